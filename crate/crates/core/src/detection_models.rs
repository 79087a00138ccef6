//! Closed-form decision statistics for the two illumination schemes.
//!
//! Both receivers integrate `M` independent signal-idler mode pairs per
//! decision, so the detector output is Gaussian. The target-absent
//! distribution is zero-mean in both cases; only the present-case mean
//! differs between CI and QI. Per-mode results are multiplied by `M` in mean
//! and variance.
//!
//! | quantity | CI homodyne            | QI phase-conjugate receiver        |
//! |----------|------------------------|------------------------------------|
//! | `mu1`    | `sqrt(2 k Ns) M`       | `±2 sqrt(k kI Ns (Ns + 1)) M`      |
//! | `sigma`  | `sqrt(Nb M)`           | `sqrt(Nb M)`                       |
//! | SNR      | `2 k Ns M / Nb`        | `4 M zeta k kI Ns / Nb`            |
//!
//! The QI moments are quoted with the common receiver scale
//! `kappa_r (G_A - 1)` divided out of both mean and variance; it cancels in
//! every ratio the ROC depends on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of one illumination scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mean signal photons per mode.
    pub n_s: f64,
    /// Mean thermal noise photons per mode at the receiver.
    pub n_b: f64,
    /// Channel (target) transmissivity.
    pub kappa: f64,
    /// Idler storage transmissivity.
    pub kappa_i: f64,
    /// Empirical imperfection factor applied to the QI SNR.
    pub zeta: f64,
    /// Modes per decision. Real-valued: `10^8.12` is a legitimate value.
    pub m: f64,
    /// Phase-conjugator gain.
    pub g_a: f64,
    /// Transmissivity between the conjugator and the balanced detector.
    pub kappa_r: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::fig4()
    }
}

impl SystemParams {
    /// Reference scenario: `M = 10^8.12`, `N_S = 6.8e-4`, `kappa = 0.086`,
    /// `N_B = 1.3e3`, PCR gain `1 + 0.321e-3`, ideal idler and receiver.
    pub fn fig4() -> Self {
        Self {
            n_s: 6.8e-4,
            n_b: 1.3e3,
            kappa: 0.086,
            kappa_i: 1.0,
            zeta: 1.0,
            m: 10f64.powf(8.12),
            g_a: 1.0 + 0.321e-3,
            kappa_r: 1.0,
        }
    }

    /// Checks every field against its physical range.
    ///
    /// `g_a = 1` is accepted: it describes a receiver with the conjugator
    /// switched off, which the Gaussian-state oracle uses as a null case.
    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, v, "must be finite"))
            }
        };
        finite("n_s", self.n_s)?;
        finite("n_b", self.n_b)?;
        finite("kappa", self.kappa)?;
        finite("kappa_i", self.kappa_i)?;
        finite("zeta", self.zeta)?;
        finite("m", self.m)?;
        finite("g_a", self.g_a)?;
        finite("kappa_r", self.kappa_r)?;

        if self.n_s <= 0.0 {
            return Err(Error::param("n_s", self.n_s, "must be > 0"));
        }
        if self.n_b < 0.0 {
            return Err(Error::param("n_b", self.n_b, "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::param("kappa", self.kappa, "must lie in [0, 1]"));
        }
        if !(self.kappa_i > 0.0 && self.kappa_i <= 1.0) {
            return Err(Error::param("kappa_i", self.kappa_i, "must lie in (0, 1]"));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::param("zeta", self.zeta, "must lie in (0, 1]"));
        }
        if self.m <= 0.0 {
            return Err(Error::param("m", self.m, "must be > 0"));
        }
        if self.g_a < 1.0 {
            return Err(Error::param("g_a", self.g_a, "must be >= 1"));
        }
        if !(self.kappa_r > 0.0 && self.kappa_r <= 1.0) {
            return Err(Error::param("kappa_r", self.kappa_r, "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Regime check `N_B >> 1 >> kappa N_S` under the given thresholds.
    pub fn regime_warnings(&self, limits: &RegimeLimits) -> Vec<RegimeWarning> {
        let mut out = Vec::new();
        if self.n_b < limits.min_n_b {
            out.push(RegimeWarning::NoiseTooLow {
                n_b: self.n_b,
                min_n_b: limits.min_n_b,
            });
        }
        let kn = self.kappa * self.n_s;
        if kn > limits.max_kappa_n_s {
            out.push(RegimeWarning::SignalTooBright {
                kappa_n_s: kn,
                max_kappa_n_s: limits.max_kappa_n_s,
            });
        }
        out
    }
}

/// Thresholds for the high-noise, weak-signal regime in which the
/// equal-variance Gaussian approximation holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLimits {
    pub min_n_b: f64,
    pub max_kappa_n_s: f64,
}

impl Default for RegimeLimits {
    fn default() -> Self {
        Self {
            min_n_b: 10.0,
            max_kappa_n_s: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    NoiseTooLow { n_b: f64, min_n_b: f64 },
    SignalTooBright { kappa_n_s: f64, max_kappa_n_s: f64 },
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeWarning::NoiseTooLow { n_b, min_n_b } => write!(
                f,
                "n_b = {n_b} is below {min_n_b}; the N_B >> 1 approximation is weak"
            ),
            RegimeWarning::SignalTooBright {
                kappa_n_s,
                max_kappa_n_s,
            } => write!(
                f,
                "kappa*n_s = {kappa_n_s} exceeds {max_kappa_n_s}; the kappa N_S << 1 approximation is weak"
            ),
        }
    }
}

/// BPSK phase of the signal arm: `Plus` is 0, `Minus` is pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn sign(self) -> f64 {
        match self {
            Phase::Plus => 1.0,
            Phase::Minus => -1.0,
        }
    }
}

/// Illumination scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ci,
    Qi,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Ci => "ci",
            Model::Qi => "qi",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(Model::Ci),
            "qi" => Ok(Model::Qi),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Gaussian moments of the detector output under both hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisMoments {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

impl HypothesisMoments {
    pub fn new(mu0: f64, sigma0: f64, mu1: f64, sigma1: f64) -> Result<Self> {
        if !(mu0.is_finite() && mu1.is_finite()) {
            return Err(Error::Degenerate("non-finite mean"));
        }
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::param("sigma0", sigma0, "must be finite and > 0"));
        }
        if !(sigma1.is_finite() && sigma1 > 0.0) {
            return Err(Error::param("sigma1", sigma1, "must be finite and > 0"));
        }
        Ok(Self {
            mu0,
            sigma0,
            mu1,
            sigma1,
        })
    }

    /// Mean separation in units of the absent-case standard deviation.
    pub fn deflection(&self) -> f64 {
        (self.mu1 - self.mu0) / self.sigma0
    }
}

fn noise_sigma(p: &SystemParams) -> Result<f64> {
    let sigma = (p.n_b * p.m).sqrt();
    if sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(Error::Degenerate(
            "n_b * m = 0 gives a zero-width detector distribution",
        ))
    }
}

/// CI homodyne moments in the `N_B >> 1` limit.
pub fn ci_moments(p: &SystemParams) -> Result<HypothesisMoments> {
    p.validate()?;
    let sigma = noise_sigma(p)?;
    let mu1 = (2.0 * p.kappa * p.n_s).sqrt() * p.m;
    HypothesisMoments::new(0.0, sigma, mu1, sigma)
}

/// QI phase-conjugate receiver moments for one BPSK phase, with the
/// receiver scale `kappa_r (G_A - 1)` removed. Keeps the `N_S + 1` factor.
pub fn qi_moments(p: &SystemParams, phase: Phase) -> Result<HypothesisMoments> {
    p.validate()?;
    let sigma = noise_sigma(p)?;
    let mu1 = phase.sign() * 2.0 * (p.kappa * p.kappa_i * p.n_s * (p.n_s + 1.0)).sqrt() * p.m;
    HypothesisMoments::new(0.0, sigma, mu1, sigma)
}

/// Moments used for decision-level ROC and simulation.
///
/// CI is [`ci_moments`]. QI is [`qi_moments`] at phase 0 with the mean scaled
/// by `sqrt(zeta)`, so the imperfection factor enters the SNR linearly.
pub fn decision_moments(p: &SystemParams, model: Model) -> Result<HypothesisMoments> {
    match model {
        Model::Ci => ci_moments(p),
        Model::Qi => {
            let mut m = qi_moments(p, Phase::Plus)?;
            m.mu1 *= p.zeta.sqrt();
            Ok(m)
        }
    }
}

/// `SNR_C = 2 kappa N_S M / N_B`.
pub fn snr_ci(p: &SystemParams) -> Result<f64> {
    p.validate()?;
    if p.n_b <= 0.0 {
        return Err(Error::Degenerate("SNR undefined for n_b = 0"));
    }
    Ok(2.0 * p.kappa * p.n_s * p.m / p.n_b)
}

/// `SNR_Q = 4 M zeta kappa kappa_I N_S / N_B` (the `N_S^2` term dropped).
pub fn snr_qi(p: &SystemParams) -> Result<f64> {
    p.validate()?;
    if p.n_b <= 0.0 {
        return Err(Error::Degenerate("SNR undefined for n_b = 0"));
    }
    Ok(4.0 * p.m * p.zeta * p.kappa * p.kappa_i * p.n_s / p.n_b)
}

/// QI over CI SNR in dB. `None` when both SNRs vanish (`kappa = 0`).
pub fn advantage_db(p: &SystemParams) -> Result<Option<f64>> {
    let ci = snr_ci(p)?;
    let qi = snr_qi(p)?;
    if ci > 0.0 {
        Ok(Some(10.0 * (qi / ci).log10()))
    } else {
        Ok(None)
    }
}

/// Largest advantage a phase-conjugate receiver can reach, `10 log10 2`.
pub const PCR_ADVANTAGE_LIMIT_DB: f64 = 3.010_299_956_639_812;

/// Relative slack above `zeta = 1` absorbed when inverting a quoted dB
/// figure (3.0103 dB rounds `10 log10 2` up by 4e-6 dB).
const ZETA_SLACK: f64 = 1e-5;

/// Inverts [`advantage_db`]: `zeta = 10^(dB/10) / (2 kappa_I)`.
pub fn fit_zeta(measured_advantage_db: f64, kappa_i: f64) -> Result<f64> {
    if !measured_advantage_db.is_finite() {
        return Err(Error::param(
            "advantage_db",
            measured_advantage_db,
            "must be finite",
        ));
    }
    if !(kappa_i > 0.0 && kappa_i <= 1.0) {
        return Err(Error::param("kappa_i", kappa_i, "must lie in (0, 1]"));
    }
    let zeta = 10f64.powf(measured_advantage_db / 10.0) / (2.0 * kappa_i);
    if zeta > 1.0 + ZETA_SLACK {
        return Err(Error::Unphysical(format!(
            "advantage of {measured_advantage_db} dB with kappa_i = {kappa_i} needs zeta = {zeta} > 1; \
             a phase-conjugate receiver is bounded by {PCR_ADVANTAGE_LIMIT_DB:.4} dB"
        )));
    }
    Ok(zeta.min(1.0))
}

/// Modes per decision from optical bandwidth and integration time, `M = W T`.
pub fn mode_count(bandwidth_hz: f64, half_period_s: f64) -> Result<f64> {
    if !(bandwidth_hz.is_finite() && bandwidth_hz >= 0.0) {
        return Err(Error::param("bandwidth_hz", bandwidth_hz, "must be >= 0"));
    }
    if !(half_period_s.is_finite() && half_period_s >= 0.0) {
        return Err(Error::param("half_period_s", half_period_s, "must be >= 0"));
    }
    Ok(bandwidth_hz * half_period_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ci_reference_values() {
        let m = ci_moments(&SystemParams::fig4()).unwrap();
        assert_eq!(m.mu0, 0.0);
        assert!(rel(m.mu1, 1.4257e6) < 1e-4);
        assert!(rel(m.sigma0, 4.1398e5) < 1e-4);
        assert_eq!(m.sigma0, m.sigma1);
        assert!((m.deflection() - 3.443_872).abs() < 1e-6);
    }

    #[test]
    fn ci_snr_is_squared_deflection() {
        let p = SystemParams::fig4();
        let m = ci_moments(&p).unwrap();
        let snr = snr_ci(&p).unwrap();
        assert!(rel(m.deflection().powi(2), snr) < 1e-14);
        assert!((snr - 11.860_254_472).abs() < 1e-8);
    }

    #[test]
    fn ci_zero_kappa_has_no_signal() {
        let p = SystemParams {
            kappa: 0.0,
            ..SystemParams::fig4()
        };
        assert_eq!(ci_moments(&p).unwrap().mu1, 0.0);
    }

    #[test]
    fn zero_noise_is_degenerate() {
        let p = SystemParams {
            n_b: 0.0,
            ..SystemParams::fig4()
        };
        assert!(matches!(ci_moments(&p), Err(Error::Degenerate(_))));
        assert!(qi_moments(&p, Phase::Plus).is_err());
    }

    #[test]
    fn qi_reference_values() {
        let p = SystemParams::fig4();
        let plus = qi_moments(&p, Phase::Plus).unwrap();
        let minus = qi_moments(&p, Phase::Minus).unwrap();
        assert!(rel(plus.mu1, 2.0169e6) < 1e-4);
        // exact B.2 form keeps N_S + 1; sqrt(SNR_Q) would give 4.87037
        assert!((plus.deflection() - 4.872_026).abs() < 1e-6);
        assert_eq!(minus.mu1, -plus.mu1);
        assert_eq!(minus.sigma1, plus.sigma1);
    }

    #[test]
    fn qi_mean_vanishes_with_signal() {
        let p = SystemParams {
            n_s: 1e-300,
            ..SystemParams::fig4()
        };
        assert!(qi_moments(&p, Phase::Plus).unwrap().mu1 < 1e-130);
    }

    #[test]
    fn ideal_receiver_doubles_snr() {
        let p = SystemParams::fig4();
        let r = snr_qi(&p).unwrap() / snr_ci(&p).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let db = advantage_db(&p).unwrap().unwrap();
        assert!((db - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn half_zeta_removes_advantage() {
        let p = SystemParams {
            zeta: 0.5,
            ..SystemParams::fig4()
        };
        assert!((snr_qi(&p).unwrap() / snr_ci(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!(advantage_db(&p).unwrap().unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_kappa_advantage_undefined() {
        let p = SystemParams {
            kappa: 0.0,
            ..SystemParams::fig4()
        };
        assert_eq!(snr_ci(&p).unwrap(), 0.0);
        assert_eq!(advantage_db(&p).unwrap(), None);
    }

    #[test]
    fn measured_advantage_inverts() {
        let zeta = fit_zeta(1.48, 1.0).unwrap();
        // 10^0.148 / 2
        assert!((zeta - 0.703_023_762_065).abs() < 1e-11);
        let p = SystemParams {
            zeta,
            ..SystemParams::fig4()
        };
        assert!((advantage_db(&p).unwrap().unwrap() - 1.48).abs() < 1e-12);
        assert_eq!(fit_zeta(3.0103, 1.0).unwrap(), 1.0);
        assert!((fit_zeta(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn advantage_above_pcr_bound_rejected() {
        assert!(matches!(fit_zeta(4.0, 1.0), Err(Error::Unphysical(_))));
        assert!(fit_zeta(2.0, 0.5).is_err());
        assert!(fit_zeta(1.0, 0.0).is_err());
        assert!(fit_zeta(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mode_count_examples() {
        assert!(rel(mode_count(1.9e12, 1e-4).unwrap(), 1.9e8) < 1e-15);
        assert_eq!(mode_count(0.0, 1e-4).unwrap(), 0.0);
        let half_period = 1.0 / (2.0 * 3571.0);
        let m = mode_count(1.9e12, half_period).unwrap();
        assert!(rel(m, 2.66e8) < 1e-3);
        // twice the M quoted for the reference ROC parameters
        assert!((m / SystemParams::fig4().m - 2.0).abs() < 0.05);
        assert!(mode_count(-1.0, 1.0).is_err());
    }

    #[test]
    fn validation_ranges() {
        let base = SystemParams::fig4();
        assert!(base.validate().is_ok());
        for bad in [
            SystemParams { n_s: 0.0, ..base },
            SystemParams { n_b: -1.0, ..base },
            SystemParams { kappa: 1.5, ..base },
            SystemParams {
                kappa_i: 0.0,
                ..base
            },
            SystemParams { zeta: 1.1, ..base },
            SystemParams { m: 0.0, ..base },
            SystemParams { g_a: 0.9, ..base },
            SystemParams {
                kappa_r: 0.0,
                ..base
            },
            SystemParams {
                n_b: f64::NAN,
                ..base
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert!(SystemParams { g_a: 1.0, ..base }.validate().is_ok());
    }

    #[test]
    fn regime_warnings_fire() {
        let limits = RegimeLimits::default();
        assert!(SystemParams::fig4().regime_warnings(&limits).is_empty());
        let p = SystemParams {
            n_b: 2.0,
            n_s: 0.5,
            kappa: 0.5,
            ..SystemParams::fig4()
        };
        let w = p.regime_warnings(&limits);
        assert_eq!(w.len(), 2);
        assert!(matches!(w[0], RegimeWarning::NoiseTooLow { .. }));
        assert!(matches!(w[1], RegimeWarning::SignalTooBright { .. }));
    }

    #[test]
    fn decision_moments_apply_zeta() {
        let p = SystemParams {
            zeta: 0.7,
            ..SystemParams::fig4()
        };
        let qi = decision_moments(&p, Model::Qi).unwrap();
        let raw = qi_moments(&p, Phase::Plus).unwrap();
        assert!(rel(qi.mu1, raw.mu1 * 0.7f64.sqrt()) < 1e-15);
        assert_eq!(
            decision_moments(&p, Model::Ci).unwrap(),
            ci_moments(&p).unwrap()
        );
    }
}
