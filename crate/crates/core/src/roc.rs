//! Receiver operating characteristics.
//!
//! A threshold `β` declares "target present" whenever the detector output
//! exceeds it, so `P_F` and `P_D` are upper-tail probabilities of the absent
//! and present distributions. The analytic curve takes those tails from the
//! normal Q-function; the empirical curve counts samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection_models::HypothesisMoments;
use crate::error::{Error, Result};

/// Default number of thresholds in a sweep.
pub const DEFAULT_THRESHOLDS: usize = 512;
/// Default bin count for the histogram-integrated empirical ROC.
pub const DEFAULT_BINS: usize = 256;

/// Standard normal upper tail `Q(x) = P(Z > x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Inverse of [`q_function`] on `(0, 1)`.
///
/// Starts from the Abramowitz-Stegun 26.2.23 rational guess and polishes with
/// Newton steps on `ln Q(x) − ln p`, which is concave in `x`, falling back to
/// bisection whenever a step leaves the current bracket.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", p, "must lie in (0, 1)"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact here
        return q_inverse(1.0 - p).map(|x| -x);
    }

    let t = (-2.0 * p.ln()).sqrt();
    let mut x = t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    x = x.clamp(lo, hi);
    let ln_p = p.ln();

    for _ in 0..200 {
        let q = q_function(x);
        if q > p {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = normal_pdf(x);
        // d ln Q / dx = −pdf / Q
        let mut next = if q > 0.0 && pdf > 0.0 {
            x + (q.ln() - ln_p) * q / pdf
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0);
        x = next;
        if converged || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(x)
}

/// Ground truth of a data set: `H0` target absent, `H1` target present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    H0,
    H1,
}

impl Label {
    pub fn tag(self) -> &'static str {
        match self {
            Label::H0 => "h0",
            Label::H1 => "h1",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h0" => Ok(Label::H0),
            "h1" => Ok(Label::H1),
            other => Err(Error::Samples(format!("unknown label `{other}`"))),
        }
    }
}

/// Detector samples recorded under one known hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    label: Label,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: Label, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Samples(format!(
                "{} set needs at least 2 samples, got {}",
                label.tag(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Samples(format!(
                "{} sample {i} is not finite",
                label.tag()
            )));
        }
        Ok(Self { label, values })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample mean and (n−1)-normalised standard deviation.
    pub fn mean_std(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (mean, (ss / (n - 1.0)).sqrt())
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub beta: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub p_f_ci: Option<(f64, f64)>,
    pub p_d_ci: Option<(f64, f64)>,
    /// `p_f` is below the smallest rate the absent set can resolve.
    pub below_resolution: bool,
}

/// Points ordered by descending threshold, so both rates are non-decreasing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    fn from_unsorted(mut points: Vec<RocPoint>) -> Self {
        points.sort_by(|a, b| b.beta.total_cmp(&a.beta));
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks ordering, ranges and confidence-interval bracketing.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[0].beta < w[1].beta || w[1].p_f < w[0].p_f || w[1].p_d < w[0].p_d {
                return Err(Error::Unphysical(format!(
                    "ROC not monotone between beta = {} and {}",
                    w[0].beta, w[1].beta
                )));
            }
        }
        for pt in &self.points {
            let unit = |x: f64| (0.0..=1.0).contains(&x);
            let brackets = |ci: Option<(f64, f64)>, x: f64| {
                ci.is_none_or(|(lo, hi)| lo <= x && x <= hi && unit(lo) && unit(hi))
            };
            if !unit(pt.p_f)
                || !unit(pt.p_d)
                || !brackets(pt.p_f_ci, pt.p_f)
                || !brackets(pt.p_d_ci, pt.p_d)
            {
                return Err(Error::Unphysical(format!(
                    "ROC point at beta = {} out of range",
                    pt.beta
                )));
            }
        }
        Ok(())
    }
}

/// `n_points` thresholds spaced linearly from `−3σ0` to `μ1 + 3σ1`.
pub fn threshold_grid(m: &HypothesisMoments, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::param("n_points", n_points as f64, "must be >= 2"));
    }
    let lo = -3.0 * m.sigma0;
    let hi = m.mu1 + 3.0 * m.sigma1;
    let step = (hi - lo) / (n_points - 1) as f64;
    let mut grid: Vec<f64> = (0..n_points).map(|k| lo + step * k as f64).collect();
    grid[n_points - 1] = hi;
    Ok(grid)
}

/// Thresholds whose analytic false-alarm rates are log-spaced from `1/2`
/// down to `pf_min`, for resolving the small-`P_F` corner.
pub fn log_pf_threshold_grid(
    m: &HypothesisMoments,
    n_points: usize,
    pf_min: f64,
) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::param("n_points", n_points as f64, "must be >= 2"));
    }
    if !(pf_min > 0.0 && pf_min < 0.5) {
        return Err(Error::param("pf_min", pf_min, "must lie in (0, 0.5)"));
    }
    let (a, b) = (0.5f64.log10(), pf_min.log10());
    (0..n_points)
        .map(|k| {
            let pf = 10f64.powf(a + (b - a) * k as f64 / (n_points - 1) as f64);
            q_inverse(pf).map(|x| m.mu0 + m.sigma0 * x)
        })
        .collect()
}

/// Analytic ROC: `P_F = Q((β − μ0)/σ0)`, `P_D = Q((β − μ1)/σ1)`.
pub fn roc_analytic(m: &HypothesisMoments, betas: &[f64]) -> RocCurve {
    let points = betas
        .iter()
        .map(|&beta| RocPoint {
            beta,
            p_f: q_function((beta - m.mu0) / m.sigma0),
            p_d: q_function((beta - m.mu1) / m.sigma1),
            p_f_ci: None,
            p_d_ci: None,
            below_resolution: false,
        })
        .collect();
    RocCurve::from_unsorted(points)
}

/// Detection probability at a fixed false-alarm rate:
/// `Q(Q⁻¹(P_F) σ0/σ1 + (μ0 − μ1)/σ1)`.
pub fn pd_at_pf(m: &HypothesisMoments, p_f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_f) {
        return Err(Error::param("p_f", p_f, "must lie in [0, 1]"));
    }
    if p_f == 0.0 {
        return Ok(0.0);
    }
    if p_f == 1.0 {
        return Ok(1.0);
    }
    let x = q_inverse(p_f)?;
    Ok(q_function(
        x * m.sigma0 / m.sigma1 + (m.mu0 - m.mu1) / m.sigma1,
    ))
}

/// Smallest nonzero rate an `n`-sample set can express.
pub fn min_resolvable_rate(n_samples: usize) -> f64 {
    1.0 / n_samples.max(1) as f64
}

/// Wilson score interval for `k` successes in `n` trials at `z` standard
/// deviations.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    (
        (centre - half).max(0.0).min(p),
        (centre + half).min(1.0).max(p),
    )
}

fn check_labels(absent: &SampleSet, present: &SampleSet) -> Result<()> {
    if absent.label() != Label::H0 {
        return Err(Error::Samples(format!(
            "absent set is labelled {}",
            absent.label().tag()
        )));
    }
    if present.label() != Label::H1 {
        return Err(Error::Samples(format!(
            "present set is labelled {}",
            present.label().tag()
        )));
    }
    Ok(())
}

/// Count of sorted values strictly above `beta`.
fn count_above(sorted: &[f64], beta: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v <= beta)
}

/// Empirical ROC by exact tail counting with 1σ Wilson intervals.
pub fn roc_empirical(absent: &SampleSet, present: &SampleSet, betas: &[f64]) -> Result<RocCurve> {
    check_labels(absent, present)?;
    let (s0, s1) = (absent.sorted(), present.sorted());
    let (n0, n1) = (s0.len(), s1.len());
    let floor = min_resolvable_rate(n0);
    let points = betas
        .par_iter()
        .map(|&beta| {
            let k0 = count_above(&s0, beta);
            let k1 = count_above(&s1, beta);
            let p_f = k0 as f64 / n0 as f64;
            RocPoint {
                beta,
                p_f,
                p_d: k1 as f64 / n1 as f64,
                p_f_ci: Some(wilson_interval(k0, n0, 1.0)),
                p_d_ci: Some(wilson_interval(k1, n1, 1.0)),
                below_resolution: p_f < floor,
            }
        })
        .collect();
    Ok(RocCurve::from_unsorted(points))
}

/// Histogram of one sample set on `[min, max]`, integrated above a threshold
/// with a uniform density inside each bin.
struct Histogram {
    lo: f64,
    width: f64,
    counts: Vec<usize>,
    n: usize,
}

impl Histogram {
    fn new(values: &[f64], n_bins: usize) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / n_bins as f64;
        let mut counts = vec![0usize; n_bins];
        for &v in values {
            let k = if width > 0.0 {
                (((v - lo) / width) as usize).min(n_bins - 1)
            } else {
                0
            };
            counts[k] += 1;
        }
        Self {
            lo,
            width,
            counts,
            n: values.len(),
        }
    }

    fn tail(&self, beta: f64) -> f64 {
        if self.width == 0.0 {
            return if beta < self.lo { 1.0 } else { 0.0 };
        }
        let mut mass = 0.0;
        for (k, &c) in self.counts.iter().enumerate() {
            let left = self.lo + self.width * k as f64;
            let right = left + self.width;
            let frac = ((right - beta) / self.width).clamp(0.0, 1.0);
            if left >= beta {
                mass += c as f64;
            } else {
                mass += c as f64 * frac;
            }
        }
        mass / self.n as f64
    }
}

/// Empirical ROC from binned densities, the finite-bin analogue of
/// [`roc_empirical`]. Rates are fractional, so no intervals are attached.
pub fn roc_empirical_binned(
    absent: &SampleSet,
    present: &SampleSet,
    betas: &[f64],
    n_bins: usize,
) -> Result<RocCurve> {
    check_labels(absent, present)?;
    if n_bins == 0 {
        return Err(Error::param("n_bins", 0.0, "must be >= 1"));
    }
    let h0 = Histogram::new(absent.values(), n_bins);
    let h1 = Histogram::new(present.values(), n_bins);
    let floor = min_resolvable_rate(absent.len());
    let points = betas
        .iter()
        .map(|&beta| {
            let p_f = h0.tail(beta);
            RocPoint {
                beta,
                p_f,
                p_d: h1.tail(beta),
                p_f_ci: None,
                p_d_ci: None,
                below_resolution: p_f < floor,
            }
        })
        .collect();
    Ok(RocCurve::from_unsorted(points))
}
