//! Experiment orchestration for the `stratolevy` CLI: configuration,
//! identity and Monte Carlo suites, and CSV reports.

pub mod config;
pub mod error;
pub mod integrand;
pub mod report;
pub mod runner;
pub mod suites;

pub use config::{ExperimentConfig, Statistic};
pub use error::HarnessError;
pub use integrand::Integrand;
pub use report::{ReportRow, SuiteReport, CSV_HEADER};
pub use runner::Runner;
