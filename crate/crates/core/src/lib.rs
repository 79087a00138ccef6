//! Neyman-Pearson target detection with quantum illumination (QI) and
//! classical illumination (CI).
//!
//! The crate is organised around the detection chain:
//!
//! - [`detection_models`]: closed-form decision-level moments and SNRs for the
//!   CI homodyne receiver and the QI phase-conjugate receiver (PCR).
//! - [`gaussian_optics`]: a covariance-matrix simulator for multimode Gaussian
//!   states, used as an independent check on every closed-form moment.
//! - [`oracle`]: grid comparison between the two.
//! - [`roc`]: analytic and empirical receiver operating characteristics.
//! - [`montecarlo`]: seeded synthesis of BPSK-modulated detector output.
//! - [`cli_io`]: configuration, data files and the `qidetect` command set.

pub mod cli_io;
pub mod detection_models;
pub mod error;
pub mod gaussian_optics;
pub mod montecarlo;
pub mod oracle;
pub mod roc;

pub use detection_models::{HypothesisMoments, Model, Phase, SystemParams};
pub use error::{Error, ErrorKind, Result};
pub use gaussian_optics::{PhotonStats, QuadratureState};
pub use montecarlo::{LabeledSeries, SimConfig};
pub use roc::{Label, RocCurve, RocPoint, SampleSet};
