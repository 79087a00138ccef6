//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qidetect::cli_io::{
    cmd_estimate, cmd_fit_zeta, cmd_oracle_check, cmd_roc, cmd_simulate, cmd_snr, FitZetaInput,
    ModelSelect, OutputFormat, Overrides, Report, RunConfig,
};

/// Exit code when a check runs to completion and fails.
const CHECK_FAILED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "qidetect", version, about = "QI versus CI target detection")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file; the built-in reference scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, global = true)]
    n_decisions: Option<usize>,
    #[arg(long, global = true)]
    thresholds: Option<usize>,
    /// Also write ROC tables on a log-spaced false-alarm grid.
    #[arg(long, global = true)]
    log_pf_grid: bool,
    /// Idler efficiency.
    #[arg(long, global = true)]
    kappa_i: Option<f64>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Ci,
    Qi,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Kv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print SNRs and the QI advantage.
    Snr,
    /// Write analytic ROC tables.
    Roc,
    /// Write simulated decision sets and detector traces.
    Simulate,
    /// Empirical ROC from absent and present data sets.
    Estimate {
        #[arg(long)]
        absent: PathBuf,
        #[arg(long)]
        present: PathBuf,
    },
    /// Imperfection factor from a measured advantage or two data sets.
    FitZeta {
        #[arg(long, conflicts_with_all = ["ci_present", "qi_present"])]
        advantage_db: Option<f64>,
        #[arg(long, requires = "qi_present")]
        ci_present: Option<PathBuf>,
        #[arg(long, requires = "ci_present")]
        qi_present: Option<PathBuf>,
    },
    /// Compare the Gaussian-state circuits with the closed forms.
    OracleCheck {
        /// Check only the configured point instead of the grid.
        #[arg(long)]
        single: bool,
    },
}

fn load_config(common: &Common) -> qidetect::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::fig4(),
    };
    cfg.apply(&Overrides {
        out: common.out.clone(),
        seed: common.seed,
        model: common.model.map(|m| match m {
            ModelArg::Ci => ModelSelect::Ci,
            ModelArg::Qi => ModelSelect::Qi,
            ModelArg::Both => ModelSelect::Both,
        }),
        n_decisions: common.n_decisions,
        thresholds: common.thresholds,
        log_pf_grid: common.log_pf_grid,
        kappa_i: common.kappa_i,
    })?;
    Ok(cfg)
}

fn run(cli: &Cli) -> qidetect::Result<Report> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let cfg = load_config(&cli.common)?;
    match &cli.command {
        Command::Snr => cmd_snr(&cfg),
        Command::Roc => cmd_roc(&cfg, stamp),
        Command::Simulate => cmd_simulate(&cfg, stamp),
        Command::Estimate { absent, present } => cmd_estimate(absent, present, &cfg, stamp),
        Command::FitZeta {
            advantage_db,
            ci_present,
            qi_present,
        } => {
            let input = match (advantage_db, ci_present, qi_present) {
                (Some(db), _, _) => FitZetaInput::AdvantageDb {
                    db: *db,
                    kappa_i: cfg.kappa_i,
                },
                (None, Some(ci), Some(qi)) => FitZetaInput::Datasets {
                    ci_present: ci.clone(),
                    qi_present: qi.clone(),
                    kappa_i: cfg.kappa_i,
                },
                _ => {
                    return Err(qidetect::Error::Config(
                        "fit-zeta needs --advantage-db or both --ci-present and --qi-present"
                            .into(),
                    ))
                }
            };
            cmd_fit_zeta(&input)
        }
        Command::OracleCheck { single } => cmd_oracle_check(&cfg, *single, stamp),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.common.format {
        FormatArg::Text => OutputFormat::Text,
        FormatArg::Kv => OutputFormat::Kv,
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.kind().exit_code();
            ExitCode::from(code as u8)
        }
    }
}
