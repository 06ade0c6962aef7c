//! Experiment configuration, Monte Carlo drivers and result files.

pub mod config;
pub mod csv;
pub mod experiment;
pub mod manifest;
pub mod output;

pub use config::{ExperimentConfig, FilterConfig, SigmaMode};
pub use experiment::{
    run_ber_experiment, run_ccdf_experiment, BerReport, BerRow, BerSummaryRow, Case, CcdfReport,
    CcdfSeries, CcdfSummaryRow, FilterBank, TelemetryRow,
};
pub use manifest::RunManifest;
