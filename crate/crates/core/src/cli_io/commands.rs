//! The `qidetect` subcommands as library functions.
//!
//! Each command returns a [`Report`] for the terminal and writes its data
//! files under the configured output directory. Everything except the
//! `generated_unix` header line is a pure function of the configuration.

use std::path::{Path, PathBuf};

use crate::detection_models::{
    advantage_db, decision_moments, fit_zeta, snr_ci, snr_qi, HypothesisMoments, Model, Phase,
    SystemParams,
};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_decisions, simulate_timeseries, SimConfig};
use crate::oracle::{self, OracleComparison, OracleSummary};
use crate::roc::{
    log_pf_threshold_grid, min_resolvable_rate, pd_at_pf, roc_analytic, roc_empirical,
    roc_empirical_binned, threshold_grid, Label, RocCurve, SampleSet,
};

use super::config::{ModelSelect, RunConfig};
use super::export::{
    decisions_to_text, fmt_f64, read_samples, series_to_text, write_text, Header, RocExport,
    TOOL_VERSION,
};

/// False-alarm rate at which reports quote the detection probability.
pub const REPORT_PF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    /// `key=value` lines for scripts.
    Kv,
}

/// Ordered key/value results plus free-form warnings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    /// `false` when a check the command performs did not pass.
    pub passed: bool,
}

impl Report {
    fn new() -> Self {
        Self {
            passed: true,
            ..Default::default()
        }
    }

    fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Text => {
                let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k:<width$}  {v}\n"));
                }
                for w in &self.warnings {
                    out.push_str(&format!("warning: {w}\n"));
                }
                for f in &self.files {
                    out.push_str(&format!("wrote {}\n", f.display()));
                }
            }
            OutputFormat::Kv => {
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k}={v}\n"));
                }
                for w in &self.warnings {
                    out.push_str(&format!("warning={w}\n"));
                }
                for f in &self.files {
                    out.push_str(&format!("file={}\n", f.display()));
                }
            }
        }
        out
    }
}

fn header(title: &str, cfg: &RunConfig, stamp: u64) -> Header {
    Header::new(format!("qidetect {title}"))
        .with("tool_version", TOOL_VERSION)
        .with("generated_unix", stamp)
        .with_config(cfg.to_text())
}

fn with_moments(h: Header, m: &HypothesisMoments) -> Header {
    h.with("mu0", fmt_f64(m.mu0))
        .with("sigma0", fmt_f64(m.sigma0))
        .with("mu1", fmt_f64(m.mu1))
        .with("sigma1", fmt_f64(m.sigma1))
}

/// `snr`: both SNRs, the advantage in dB, and regime warnings.
pub fn cmd_snr(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.system_params()?;
    let mut r = Report::new();
    let ci = snr_ci(&p)?;
    let qi = snr_qi(&p)?;
    r.put("snr_ci", fmt_f64(ci));
    r.put("snr_qi", fmt_f64(qi));
    r.put("d_ci", fmt_f64(ci.sqrt()));
    r.put("d_qi", fmt_f64(qi.sqrt()));
    match advantage_db(&p)? {
        Some(db) => r.put("advantage_db", format!("{db:.4}")),
        None => r.put("advantage_db", "n/a"),
    }
    r.warnings = p
        .regime_warnings(&cfg.regime_limits())
        .iter()
        .map(ToString::to_string)
        .collect();
    Ok(r)
}

/// A named decision-level model for ROC tables.
struct Scenario {
    tag: &'static str,
    moments: HypothesisMoments,
}

fn roc_scenarios(cfg: &RunConfig, p: &SystemParams) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for &model in cfg.model.models() {
        match model {
            Model::Ci => out.push(Scenario {
                tag: "ci",
                moments: decision_moments(p, Model::Ci)?,
            }),
            Model::Qi => {
                let ideal = SystemParams {
                    zeta: 1.0,
                    kappa_i: 1.0,
                    ..*p
                };
                out.push(Scenario {
                    tag: "qi_ideal",
                    moments: decision_moments(&ideal, Model::Qi)?,
                });
                if p.zeta != 1.0 || p.kappa_i != 1.0 {
                    out.push(Scenario {
                        tag: "qi_fitted",
                        moments: decision_moments(p, Model::Qi)?,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `roc`: analytic ROC tables for every selected model.
pub fn cmd_roc(cfg: &RunConfig, stamp: u64) -> Result<Report> {
    let p = cfg.system_params()?;
    let scenarios = roc_scenarios(cfg, &p)?;
    let mut r = Report::new();
    r.warnings = p
        .regime_warnings(&cfg.regime_limits())
        .iter()
        .map(ToString::to_string)
        .collect();

    let mut pf_grid: Vec<f64> = Vec::new();
    for s in &scenarios {
        let h = with_moments(header("roc", cfg, stamp), &s.moments)
            .with("model", s.tag)
            .with("m", fmt_f64(p.m));
        let curve = roc_analytic(&s.moments, &threshold_grid(&s.moments, cfg.thresholds)?);
        let path = cfg.out.join(format!("roc_{}.csv", s.tag));
        RocExport::from_curve(h.clone(), &curve, s.tag).write(&path)?;
        r.files.push(path);
        if s.tag == "ci" {
            pf_grid.extend(curve.points.iter().map(|pt| pt.p_f));
        }

        if cfg.log_pf_grid {
            let betas = log_pf_threshold_grid(&s.moments, cfg.thresholds, cfg.log_pf_min)?;
            let small = roc_analytic(&s.moments, &betas);
            let path = cfg.out.join(format!("roc_{}_small_pf.csv", s.tag));
            RocExport::from_curve(h, &small, s.tag).write(&path)?;
            r.files.push(path);
            if s.tag == "ci" {
                pf_grid.extend(small.points.iter().map(|pt| pt.p_f));
            }
        }

        r.put(
            format!("d_{}", s.tag),
            format!("{:.6}", s.moments.deflection()),
        );
        r.put(
            format!("pd_at_pf_1e-4_{}", s.tag),
            format!("{:.6}", pd_at_pf(&s.moments, REPORT_PF)?),
        );
    }

    if cfg.model == ModelSelect::Both {
        pf_grid.retain(|&pf| pf > 0.0 && pf < 1.0);
        pf_grid.sort_by(f64::total_cmp);
        pf_grid.dedup();
        let path = cfg.out.join("roc_compare.csv");
        write_text(&path, &compare_table(cfg, stamp, &scenarios, &pf_grid)?)?;
        r.files.push(path);
    }
    Ok(r)
}

/// `p_d` of every scenario on one shared false-alarm grid.
fn compare_table(
    cfg: &RunConfig,
    stamp: u64,
    scenarios: &[Scenario],
    pf_grid: &[f64],
) -> Result<String> {
    let mut text = String::new();
    let mut h = header("roc compare", cfg, stamp);
    for s in scenarios {
        h = h.with(format!("d_{}", s.tag), fmt_f64(s.moments.deflection()));
    }
    text.push_str(&h.to_text());
    text.push_str("p_f");
    for s in scenarios {
        text.push_str(&format!(",p_d_{}", s.tag));
    }
    text.push('\n');
    for &pf in pf_grid {
        text.push_str(&fmt_f64(pf));
        for s in scenarios {
            text.push(',');
            text.push_str(&fmt_f64(pd_at_pf(&s.moments, pf)?));
        }
        text.push('\n');
    }
    Ok(text)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `simulate`: decision data sets and short traces for each model.
pub fn cmd_simulate(cfg: &RunConfig, stamp: u64) -> Result<Report> {
    let mut r = Report::new();
    for &model in cfg.model.models() {
        let sim = cfg.sim_config(model)?;
        for label in [Label::H0, Label::H1] {
            let set = simulate_decisions(&sim, label)?;
            let (mu, sigma) = sim.decision_distribution(label)?;
            let (m, s) = mean_std(set.values());
            let key = format!("{}_{}", model.tag(), label.tag());
            r.put(format!("{key}_mean"), fmt_f64(m));
            r.put(format!("{key}_std"), fmt_f64(s));
            r.put(format!("{key}_mean_expected"), fmt_f64(mu));
            r.put(format!("{key}_std_expected"), fmt_f64(sigma));

            let h = header("decisions", cfg, stamp)
                .with("label", label.tag())
                .with("model", model.tag());
            let path = cfg.out.join(format!("decisions_{key}.csv"));
            write_text(&path, &decisions_to_text(&h, &set))?;
            r.files.push(path);

            let trace_cfg = SimConfig {
                n_decisions: cfg.timeseries_periods,
                ..sim
            };
            let series = simulate_timeseries(&trace_cfg, label)?;
            let h = header("timeseries", cfg, stamp)
                .with("label", label.tag())
                .with("model", model.tag());
            let path = cfg.out.join(format!("timeseries_{key}.csv"));
            write_text(&path, &series_to_text(&h, &series))?;
            r.files.push(path);
        }
    }
    Ok(r)
}

/// Thresholds for an empirical sweep: the usual `−3σ0 … μ1 + 3σ1` grid on
/// fitted moments, or the padded data range when a set has no spread.
fn empirical_thresholds(
    absent: &SampleSet,
    present: &SampleSet,
    n: usize,
) -> Result<(Vec<f64>, Option<HypothesisMoments>)> {
    let (m0, s0) = absent.mean_std();
    let (m1, s1) = present.mean_std();
    // the absent set is centred on zero by construction; shift the grid with it
    if let Ok(fit) = HypothesisMoments::new(m0, s0, m1, s1) {
        let centred = HypothesisMoments::new(0.0, s0, m1 - m0, s1)?;
        let grid = threshold_grid(&centred, n)?
            .into_iter()
            .map(|b| b + m0)
            .collect();
        return Ok((grid, Some(fit)));
    }
    let all = absent.values().iter().chain(present.values());
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let step = (hi - lo) / (n - 1) as f64;
    Ok(((0..n).map(|k| lo + step * k as f64).collect(), None))
}

/// `estimate`: empirical ROC from an absent and a present data set.
pub fn cmd_estimate(absent: &Path, present: &Path, cfg: &RunConfig, stamp: u64) -> Result<Report> {
    let a = read_samples(absent, Label::H0)?;
    let p = read_samples(present, Label::H1)?;
    let (betas, fit) = empirical_thresholds(&a, &p, cfg.thresholds)?;
    let curve: RocCurve = if cfg.bins > 0 {
        roc_empirical_binned(&a, &p, &betas, cfg.bins)?
    } else {
        roc_empirical(&a, &p, &betas)?
    };

    let mut r = Report::new();
    r.put("n_absent", a.len());
    r.put("n_present", p.len());
    r.put("min_resolvable_pf", fmt_f64(min_resolvable_rate(a.len())));
    r.put(
        "points_below_resolution",
        curve.points.iter().filter(|pt| pt.below_resolution).count(),
    );

    let mut h = header("roc empirical", cfg, stamp)
        .with("absent", absent.display())
        .with("present", present.display())
        .with("n_absent", a.len())
        .with("n_present", p.len())
        .with("method", if cfg.bins > 0 { "binned" } else { "counting" });
    if let Some(fit) = &fit {
        h = with_moments(h, fit);
    }
    let path = cfg.out.join("roc_empirical.csv");
    RocExport::from_curve(h, &curve, "empirical").write(&path)?;
    r.files.push(path);

    match fit {
        Some(fit) => {
            r.put("mu0", fmt_f64(fit.mu0));
            r.put("sigma0", fmt_f64(fit.sigma0));
            r.put("mu1", fmt_f64(fit.mu1));
            r.put("sigma1", fmt_f64(fit.sigma1));
            r.put("deflection", format!("{:.6}", fit.deflection()));
            let h = with_moments(header("roc fitted", cfg, stamp), &fit).with("model", "fitted");
            let fitted = roc_analytic(&fit, &betas);
            let path = cfg.out.join("roc_fitted.csv");
            RocExport::from_curve(h, &fitted, "fitted").write(&path)?;
            r.files.push(path);
        }
        None => {
            r.put("deflection", "n/a");
            r.warnings
                .push("a data set has zero spread; no Gaussian fit was made".into());
        }
    }
    Ok(r)
}

/// Inputs accepted by `fit-zeta`.
#[derive(Debug, Clone, PartialEq)]
pub enum FitZetaInput {
    AdvantageDb {
        db: f64,
        kappa_i: f64,
    },
    /// Present-case data sets of the CI and QI receivers.
    Datasets {
        ci_present: PathBuf,
        qi_present: PathBuf,
        kappa_i: f64,
    },
}

/// `fit-zeta`: imperfection factor from a measured advantage.
pub fn cmd_fit_zeta(input: &FitZetaInput) -> Result<Report> {
    let mut r = Report::new();
    let (db, kappa_i) = match input {
        FitZetaInput::AdvantageDb { db, kappa_i } => (*db, *kappa_i),
        FitZetaInput::Datasets {
            ci_present,
            qi_present,
            kappa_i,
        } => {
            let ci = read_samples(ci_present, Label::H1)?;
            let qi = read_samples(qi_present, Label::H1)?;
            let d = |s: &SampleSet| {
                let (m, sd) = s.mean_std();
                m / sd
            };
            let (d_ci, d_qi) = (d(&ci), d(&qi));
            if !(d_ci.is_finite() && d_ci > 0.0 && d_qi.is_finite() && d_qi > 0.0) {
                return Err(Error::Samples(format!(
                    "need positive finite d' for both sets, got ci = {d_ci}, qi = {d_qi}"
                )));
            }
            r.put("d_ci", format!("{d_ci:.6}"));
            r.put("d_qi", format!("{d_qi:.6}"));
            (20.0 * (d_qi / d_ci).log10(), *kappa_i)
        }
    };
    let zeta = fit_zeta(db, kappa_i)?;
    r.put("advantage_db", format!("{db:.6}"));
    r.put("kappa_i", kappa_i);
    r.put("zeta", format!("{zeta:.6}"));
    Ok(r)
}

/// `oracle-check`: Gaussian-state circuits against the closed forms.
pub fn cmd_oracle_check(cfg: &RunConfig, single: bool, stamp: u64) -> Result<Report> {
    let base = cfg.system_params()?;
    let points = if single {
        vec![base]
    } else {
        oracle::default_grid(&base)
    };
    let mut qi_rows = Vec::with_capacity(2 * points.len());
    let mut ci_rows = Vec::with_capacity(points.len());
    for p in &points {
        qi_rows.push(oracle::compare_qi(p, Phase::Plus)?);
        qi_rows.push(oracle::compare_qi(p, Phase::Minus)?);
        ci_rows.push(oracle::compare_ci(p)?);
    }

    let mut r = Report::new();
    let mut put_summary = |tag: &str, s: &OracleSummary| {
        r.put(format!("{tag}_points"), s.points);
        r.put(
            format!("{tag}_max_mean_rel_dev"),
            format!("{:.3e}", s.max_mean_rel_dev),
        );
        r.put(
            format!("{tag}_max_variance_rel_dev"),
            format!("{:.3e}", s.max_variance_rel_dev),
        );
        r.put(format!("{tag}_failures"), s.failures);
    };
    let qi = oracle::summarize(&qi_rows);
    let ci = oracle::summarize(&ci_rows);
    put_summary("qi", &qi);
    put_summary("ci", &ci);
    r.put("mean_tolerance", format!("{:.0e}", oracle::MEAN_REL_TOL));
    r.put(
        "variance_tolerance",
        format!("{:.0e}", oracle::VARIANCE_REL_TOL),
    );
    r.passed = qi.failures == 0 && ci.failures == 0;
    r.put("result", if r.passed { "pass" } else { "fail" });

    let path = cfg.out.join("oracle_check.csv");
    write_text(
        &path,
        &oracle_table(&header("oracle check", cfg, stamp), &qi_rows, &ci_rows),
    )?;
    r.files.push(path);
    Ok(r)
}

fn oracle_table(h: &Header, qi: &[OracleComparison], ci: &[OracleComparison]) -> String {
    let mut text = h.to_text();
    text.push_str(
        "model,phase,n_s,n_b,kappa,g_a,mean_exact,mean_closed,variance_exact,variance_closed,pass\n",
    );
    for c in qi.iter().chain(ci) {
        let phase = match c.phase {
            Phase::Plus => "plus",
            Phase::Minus => "minus",
        };
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.model.tag(),
            phase,
            fmt_f64(c.params.n_s),
            fmt_f64(c.params.n_b),
            fmt_f64(c.params.kappa),
            fmt_f64(c.params.g_a),
            fmt_f64(c.mean_exact),
            fmt_f64(c.mean_closed),
            c.variance_exact.map(fmt_f64).unwrap_or_default(),
            fmt_f64(c.variance_closed),
            u8::from(c.passed())
        ));
    }
    text
}
