//! Experiment runner for lattice discretizations: JSON configs in, JSON
//! reports and CSV scan tables out.

pub mod config;
pub mod emit;
pub mod error;
pub mod exec;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, Format, Mode};
pub use error::RunError;
pub use exec::RayonExecutor;
pub use report::RunReport;
pub use runner::{run, RunOutput};
