//! Seeded synthesis of detector output under each hypothesis.
//!
//! Noise is drawn once per decision window rather than once per optical mode:
//! with `M ~ 10^8` modes per window the integrated output is Gaussian with
//! the moments from [`crate::detection_models`], so one draw per window is
//! statistically equivalent.
//!
//! Randomness is counter-based. The output is cut into fixed-size blocks and
//! block `b` of stream `s` draws from a ChaCha8 generator keyed by the seed
//! with stream id `(s << 32) | b`. Blocks are filled in parallel, and the
//! result does not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection_models::{decision_moments, HypothesisMoments, Model, SystemParams};
use crate::error::{Error, Result};
use crate::roc::{Label, SampleSet};

/// Modulation frequency of the BPSK phase modulator.
pub const DEFAULT_F_MOD_HZ: f64 = 3571.0;

const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    pub f_mod: f64,
    pub samples_per_halfperiod: usize,
    pub n_decisions: usize,
    pub seed: u64,
    pub model: Model,
    /// Multiplies the present-case standard deviation.
    pub sigma_present_scale: f64,
}

impl SimConfig {
    pub fn new(params: SystemParams, model: Model, n_decisions: usize, seed: u64) -> Self {
        Self {
            params,
            f_mod: DEFAULT_F_MOD_HZ,
            samples_per_halfperiod: 1,
            n_decisions,
            seed,
            model,
            sigma_present_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.f_mod.is_finite() && self.f_mod > 0.0) {
            return Err(Error::param("f_mod", self.f_mod, "must be > 0"));
        }
        if self.samples_per_halfperiod == 0 {
            return Err(Error::param("samples_per_halfperiod", 0.0, "must be >= 1"));
        }
        if self.n_decisions == 0 {
            return Err(Error::param("n_decisions", 0.0, "must be >= 1"));
        }
        if !(self.sigma_present_scale.is_finite() && self.sigma_present_scale > 0.0) {
            return Err(Error::param(
                "sigma_present_scale",
                self.sigma_present_scale,
                "must be > 0",
            ));
        }
        Ok(())
    }

    /// Mean and standard deviation of one decision under `hypothesis`.
    pub fn decision_distribution(&self, hypothesis: Label) -> Result<(f64, f64)> {
        let m: HypothesisMoments = decision_moments(&self.params, self.model)?;
        Ok(match hypothesis {
            Label::H0 => (m.mu0, m.sigma0),
            Label::H1 => (m.mu1, m.sigma1 * self.sigma_present_scale),
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Stream {
    Decisions(Label),
    Series(Label),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Decisions(Label::H0) => 1,
            Stream::Decisions(Label::H1) => 2,
            Stream::Series(Label::H0) => 3,
            Stream::Series(Label::H1) => 4,
        }
    }
}

/// Fills `out` with standard normal draws from `stream`.
fn standard_normals(seed: u64, stream: Stream, out: &mut [f64]) {
    out.par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((stream.id() << 32) | block as u64);
            for x in chunk.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
            }
        });
}

/// One Gaussian sample per decision window.
pub fn simulate_decisions(cfg: &SimConfig, hypothesis: Label) -> Result<SampleSet> {
    cfg.validate()?;
    let (mu, sigma) = cfg.decision_distribution(hypothesis)?;
    let mut values = vec![0.0; cfg.n_decisions];
    standard_normals(cfg.seed, Stream::Decisions(hypothesis), &mut values);
    for v in &mut values {
        *v = mu + sigma * *v;
    }
    SampleSet::new(hypothesis, values)
}

/// A sampled detector trace with BPSK half-period windows.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub label: Label,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Index of the last sample in each half-period window.
    pub decision_marks: Vec<usize>,
}

impl LabeledSeries {
    pub fn samples_per_window(&self) -> usize {
        match self.decision_marks.first() {
            Some(&first) => first + 1,
            None => 0,
        }
    }

    pub fn n_windows(&self) -> usize {
        self.decision_marks.len()
    }

    /// Per-window averages, in window order.
    pub fn window_means(&self) -> Vec<f64> {
        let mut start = 0;
        self.decision_marks
            .iter()
            .map(|&end| {
                let w = &self.values[start..=end];
                start = end + 1;
                w.iter().sum::<f64>() / w.len() as f64
            })
            .collect()
    }
}

/// Detector trace over `n_decisions` modulation periods (two half-period
/// windows each). Under `H1` the mean follows the BPSK square wave, `+μ1` in
/// even windows and `−μ1` in odd ones. Per-sample noise is `σ √k` for `k`
/// samples per window so each window average has the decision-level `σ`.
pub fn simulate_timeseries(cfg: &SimConfig, hypothesis: Label) -> Result<LabeledSeries> {
    cfg.validate()?;
    let (mu, sigma) = cfg.decision_distribution(hypothesis)?;
    let k = cfg.samples_per_halfperiod;
    let windows = 2 * cfg.n_decisions;
    let n = windows * k;
    let dt = 1.0 / (2.0 * cfg.f_mod * k as f64);
    let sample_sigma = sigma * (k as f64).sqrt();

    let mut values = vec![0.0; n];
    standard_normals(cfg.seed, Stream::Series(hypothesis), &mut values);
    for (idx, v) in values.iter_mut().enumerate() {
        let sign = if (idx / k) % 2 == 0 { 1.0 } else { -1.0 };
        *v = sign * mu + sample_sigma * *v;
    }
    Ok(LabeledSeries {
        label: hypothesis,
        times: (0..n).map(|i| i as f64 * dt).collect(),
        values,
        decision_marks: (1..=windows).map(|w| w * k - 1).collect(),
    })
}

/// BPSK phase at which a trace is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingPhase {
    Zero,
    Pi,
}

/// Window averages at one BPSK phase, without any sign convention applied.
pub fn phase_window_means(series: &LabeledSeries, phase: SamplingPhase) -> Result<Vec<f64>> {
    if series.values.is_empty() || series.decision_marks.is_empty() {
        return Err(Error::Samples("empty series".into()));
    }
    let offset = match phase {
        SamplingPhase::Zero => 0,
        SamplingPhase::Pi => 1,
    };
    Ok(series
        .window_means()
        .into_iter()
        .skip(offset)
        .step_by(2)
        .collect())
}

/// One decision per modulation period at the chosen phase. Pi-phase windows
/// are sign-flipped so both phases give positively displaced present sets.
pub fn sample_at_phase(series: &LabeledSeries, phase: SamplingPhase) -> Result<SampleSet> {
    let mut values = phase_window_means(series, phase)?;
    if phase == SamplingPhase::Pi {
        for v in &mut values {
            *v = -*v;
        }
    }
    SampleSet::new(series.label, values)
}
