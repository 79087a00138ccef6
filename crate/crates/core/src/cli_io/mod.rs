//! Configuration, data files and the subcommands behind the `qidetect` binary.

pub mod commands;
pub mod config;
pub mod export;

pub use commands::{
    cmd_estimate, cmd_fit_zeta, cmd_oracle_check, cmd_roc, cmd_simulate, cmd_snr, FitZetaInput,
    OutputFormat, Report,
};
pub use config::{ModelSelect, Overrides, RunConfig};
pub use export::{Header, RocExport, RocRow};
