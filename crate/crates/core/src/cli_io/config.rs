//! Run configuration: a flat `key = value` file (TOML syntax) plus
//! command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detection_models::{Model, RegimeLimits, SystemParams};
use crate::error::{Error, Result};
use crate::montecarlo::{SimConfig, DEFAULT_F_MOD_HZ};
use crate::roc::DEFAULT_THRESHOLDS;

/// The shipped reference scenario.
pub const FIG4_SCENARIO: &str = include_str!("../../scenarios/fig4.toml");

const DEFAULT_M_EXP: f64 = 8.12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelSelect {
    Ci,
    Qi,
    #[default]
    Both,
}

impl ModelSelect {
    pub fn models(self) -> &'static [Model] {
        match self {
            ModelSelect::Ci => &[Model::Ci],
            ModelSelect::Qi => &[Model::Qi],
            ModelSelect::Both => &[Model::Ci, Model::Qi],
        }
    }
}

impl std::str::FromStr for ModelSelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(ModelSelect::Ci),
            "qi" => Ok(ModelSelect::Qi),
            "both" => Ok(ModelSelect::Both),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected ci, qi or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_s: f64,
    pub n_b: f64,
    pub kappa: f64,
    pub kappa_i: f64,
    pub zeta: f64,
    /// Modes per decision. Mutually exclusive with `m_exp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// `M = 10^m_exp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_exp: Option<f64>,
    pub g_a: f64,
    pub kappa_r: f64,

    pub model: ModelSelect,
    pub thresholds: usize,
    pub log_pf_grid: bool,
    pub log_pf_min: f64,
    /// Histogram bins for the empirical ROC; 0 selects exact counting.
    pub bins: usize,

    pub n_decisions: usize,
    pub seed: u64,
    pub f_mod: f64,
    pub samples_per_halfperiod: usize,
    pub sigma_present_scale: f64,
    pub timeseries_periods: usize,

    pub regime_min_n_b: f64,
    pub regime_max_kappa_n_s: f64,

    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SystemParams::fig4();
        let limits = RegimeLimits::default();
        Self {
            n_s: p.n_s,
            n_b: p.n_b,
            kappa: p.kappa,
            kappa_i: p.kappa_i,
            zeta: p.zeta,
            m: None,
            m_exp: None,
            g_a: p.g_a,
            kappa_r: p.kappa_r,
            model: ModelSelect::Both,
            thresholds: DEFAULT_THRESHOLDS,
            log_pf_grid: false,
            log_pf_min: 1e-8,
            bins: 0,
            n_decisions: 1_000_000,
            seed: 20240613,
            f_mod: DEFAULT_F_MOD_HZ,
            samples_per_halfperiod: 1,
            sigma_present_scale: 1.0,
            timeseries_periods: 100,
            regime_min_n_b: limits.min_n_b,
            regime_max_kappa_n_s: limits.max_kappa_n_s,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that win over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub model: Option<ModelSelect>,
    pub n_decisions: Option<usize>,
    pub thresholds: Option<usize>,
    pub log_pf_grid: bool,
    pub kappa_i: Option<f64>,
}

impl RunConfig {
    /// Parses configuration text; `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The shipped reference scenario.
    pub fn fig4() -> Self {
        Self::parse(FIG4_SCENARIO, "scenarios/fig4.toml").expect("shipped scenario parses")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(model) = o.model {
            self.model = model;
        }
        if let Some(n) = o.n_decisions {
            self.n_decisions = n;
        }
        if let Some(n) = o.thresholds {
            self.thresholds = n;
        }
        if o.log_pf_grid {
            self.log_pf_grid = true;
        }
        if let Some(k) = o.kappa_i {
            self.kappa_i = k;
        }
        self.validate()
    }

    pub fn modes_per_decision(&self) -> Result<f64> {
        match (self.m, self.m_exp) {
            (Some(_), Some(_)) => Err(Error::Config("set either `m` or `m_exp`, not both".into())),
            (Some(m), None) => Ok(m),
            (None, Some(e)) => Ok(10f64.powf(e)),
            (None, None) => Ok(10f64.powf(DEFAULT_M_EXP)),
        }
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let p = SystemParams {
            n_s: self.n_s,
            n_b: self.n_b,
            kappa: self.kappa,
            kappa_i: self.kappa_i,
            zeta: self.zeta,
            m: self.modes_per_decision()?,
            g_a: self.g_a,
            kappa_r: self.kappa_r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn regime_limits(&self) -> RegimeLimits {
        RegimeLimits {
            min_n_b: self.regime_min_n_b,
            max_kappa_n_s: self.regime_max_kappa_n_s,
        }
    }

    pub fn sim_config(&self, model: Model) -> Result<SimConfig> {
        let cfg = SimConfig {
            params: self.system_params()?,
            f_mod: self.f_mod,
            samples_per_halfperiod: self.samples_per_halfperiod,
            n_decisions: self.n_decisions,
            seed: self.seed,
            model,
            sigma_present_scale: self.sigma_present_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.system_params()?;
        if self.thresholds < 2 {
            return Err(Error::Config(format!(
                "thresholds = {} (need at least 2)",
                self.thresholds
            )));
        }
        if !(self.log_pf_min > 0.0 && self.log_pf_min < 0.5) {
            return Err(Error::Config(format!(
                "log_pf_min = {} must lie in (0, 0.5)",
                self.log_pf_min
            )));
        }
        if self.n_decisions < 2 {
            return Err(Error::Config(format!(
                "n_decisions = {} (need at least 2)",
                self.n_decisions
            )));
        }
        if self.samples_per_halfperiod == 0 || self.timeseries_periods == 0 {
            return Err(Error::Config(
                "samples_per_halfperiod and timeseries_periods must be >= 1".into(),
            ));
        }
        if !(self.f_mod > 0.0 && self.sigma_present_scale > 0.0) {
            return Err(Error::Config(
                "f_mod and sigma_present_scale must be > 0".into(),
            ));
        }
        if !(self.regime_min_n_b >= 0.0 && self.regime_max_kappa_n_s >= 0.0) {
            return Err(Error::Config("regime limits must be >= 0".into()));
        }
        Ok(())
    }

    /// Effective configuration as `key = value` lines.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenario_matches_reference_params() {
        let cfg = RunConfig::fig4();
        let p = cfg.system_params().unwrap();
        assert_eq!(p, SystemParams::fig4());
        assert_eq!(cfg.m_exp, Some(8.12));
        assert_eq!(cfg.model, ModelSelect::Both);
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let err = RunConfig::parse("n_s = 1e-3\nkapa = 0.1\n", "test.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.toml"), "{msg}");
        assert!(msg.contains("kapa"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert_eq!(err.kind(), crate::error::ErrorKind::Config);
    }

    #[test]
    fn m_and_exponent_are_exclusive() {
        let err = RunConfig::parse("m = 1e8\nm_exp = 8.0\n", "t").unwrap_err();
        assert!(err.to_string().contains("m_exp"));
        let cfg = RunConfig::parse("m = 1.5e8\n", "t").unwrap();
        assert_eq!(cfg.system_params().unwrap().m, 1.5e8);
    }

    #[test]
    fn physical_errors_surface() {
        let err = RunConfig::parse("kappa = 1.5\n", "t").unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Physics);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::fig4();
        cfg.apply(&Overrides {
            seed: Some(5),
            model: Some(ModelSelect::Qi),
            thresholds: Some(64),
            log_pf_grid: true,
            kappa_i: Some(0.5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.model, ModelSelect::Qi);
        assert_eq!(cfg.thresholds, 64);
        assert!(cfg.log_pf_grid);
        assert_eq!(cfg.kappa_i, 0.5);
        let bad = cfg.apply(&Overrides {
            thresholds: Some(1),
            ..Default::default()
        });
        assert!(bad.is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::fig4();
        cfg.zeta = 0.703_023_762_064_957;
        cfg.seed = u32::MAX as u64 + 3;
        let back = RunConfig::parse(&cfg.to_text(), "echo").unwrap();
        assert_eq!(back, cfg);
    }
}
