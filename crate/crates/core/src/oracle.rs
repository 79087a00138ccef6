//! Cross-check of the closed-form per-mode moments against the Gaussian-state
//! circuits in [`crate::gaussian_optics::circuit`].
//!
//! The closed forms quote QI moments with `Λ² = κ_R (G_A − 1)` divided out
//! and CI moments with a factor `√2` moved from the mean into the noise, so
//! each exact result is rescaled the same way before comparing. Means are
//! exact on both sides. Variances are not: the closed forms keep only the
//! leading `N_B` term.

use crate::detection_models::{ci_moments, qi_moments, Model, Phase, SystemParams};
use crate::error::Result;
use crate::gaussian_optics::circuit::{ci_output_stats, qi_output_stats, DEFAULT_LO_AMPLITUDE};

/// Relative tolerance on per-mode means.
pub const MEAN_REL_TOL: f64 = 1e-6;
/// Relative tolerance on per-mode variances at `N_B >= 100`.
pub const VARIANCE_REL_TOL: f64 = 1e-2;
/// Absolute tolerance on means when the closed form is exactly zero.
pub const MEAN_ABS_TOL: f64 = 1e-12;

pub const GRID_N_S: [f64; 3] = [1e-4, 1e-3, 1e-2];
pub const GRID_N_B: [f64; 3] = [1e2, 1e3, 1e4];
pub const GRID_KAPPA: [f64; 3] = [0.01, 0.086, 0.5];
pub const GRID_GAIN_MINUS_ONE: [f64; 3] = [1e-4, 3.21e-4, 1e-2];

/// The 81-point parameter grid; other fields follow `base`.
pub fn default_grid(base: &SystemParams) -> Vec<SystemParams> {
    let mut out = Vec::with_capacity(81);
    for &n_s in &GRID_N_S {
        for &n_b in &GRID_N_B {
            for &kappa in &GRID_KAPPA {
                for &g in &GRID_GAIN_MINUS_ONE {
                    out.push(SystemParams {
                        n_s,
                        n_b,
                        kappa,
                        g_a: 1.0 + g,
                        ..*base
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub params: SystemParams,
    pub model: Model,
    pub phase: Phase,
    /// Exact per-mode mean after rescaling to the closed-form convention.
    pub mean_exact: f64,
    pub mean_closed: f64,
    /// `None` when the closed-form variance scale vanishes (`G_A = 1`).
    pub variance_exact: Option<f64>,
    pub variance_closed: f64,
}

impl OracleComparison {
    pub fn mean_rel_dev(&self) -> f64 {
        rel_dev(self.mean_exact, self.mean_closed)
    }

    pub fn variance_rel_dev(&self) -> Option<f64> {
        self.variance_exact
            .map(|v| rel_dev(v, self.variance_closed))
    }

    pub fn mean_ok(&self) -> bool {
        if self.mean_closed == 0.0 {
            self.mean_exact.abs() <= MEAN_ABS_TOL
        } else {
            self.mean_rel_dev() <= MEAN_REL_TOL
        }
    }

    pub fn variance_ok(&self) -> bool {
        self.variance_rel_dev()
            .is_none_or(|d| d <= VARIANCE_REL_TOL)
    }

    pub fn passed(&self) -> bool {
        self.mean_ok() && self.variance_ok()
    }
}

fn rel_dev(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        ((x - reference) / reference).abs()
    }
}

/// Compares the phase-conjugate receiver circuit against [`qi_moments`].
pub fn compare_qi(p: &SystemParams, phase: Phase) -> Result<OracleComparison> {
    let exact = qi_output_stats(p, phase)?;
    let closed = qi_moments(p, phase)?;
    let scale = p.kappa_r * (p.g_a - 1.0);
    let (mean_exact, variance_exact) = if scale > 0.0 {
        (exact.mean / scale.sqrt(), Some(exact.variance / scale))
    } else {
        (exact.mean, None)
    };
    let mean_closed = if scale > 0.0 { closed.mu1 / p.m } else { 0.0 };
    Ok(OracleComparison {
        params: *p,
        model: Model::Qi,
        phase,
        mean_exact,
        mean_closed,
        variance_exact,
        variance_closed: closed.sigma1.powi(2) / p.m,
    })
}

/// Compares the homodyne circuit against [`ci_moments`].
pub fn compare_ci(p: &SystemParams) -> Result<OracleComparison> {
    let exact = ci_output_stats(p, DEFAULT_LO_AMPLITUDE)?;
    let closed = ci_moments(p)?;
    Ok(OracleComparison {
        params: *p,
        model: Model::Ci,
        phase: Phase::Plus,
        mean_exact: exact.mean / std::f64::consts::SQRT_2,
        mean_closed: closed.mu1 / p.m,
        variance_exact: Some(exact.variance / 2.0),
        variance_closed: closed.sigma1.powi(2) / p.m,
    })
}

/// Summary over a set of comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleSummary {
    pub points: usize,
    pub max_mean_rel_dev: f64,
    pub max_variance_rel_dev: f64,
    pub failures: usize,
}

pub fn summarize(rows: &[OracleComparison]) -> OracleSummary {
    rows.iter().fold(OracleSummary::default(), |mut acc, r| {
        acc.points += 1;
        if r.mean_closed != 0.0 {
            acc.max_mean_rel_dev = acc.max_mean_rel_dev.max(r.mean_rel_dev());
        }
        if let Some(d) = r.variance_rel_dev() {
            acc.max_variance_rel_dev = acc.max_variance_rel_dev.max(d);
        }
        if !r.passed() {
            acc.failures += 1;
        }
        acc
    })
}
