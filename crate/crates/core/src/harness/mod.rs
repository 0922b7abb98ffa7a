//! Experiment engine: configs, file formats, coverage runs and figure data.

pub mod commands;
pub mod config;
pub mod coverage;
pub mod experiment;
pub mod io;
pub mod report;
pub mod stats;

pub use commands::{cmd_calibrate, cmd_coverage, cmd_report, cmd_simulate, exit_code, EXIT_IO, EXIT_VALIDATION};
pub use config::{EnvConfig, ExperimentConfig, Overrides, PilotConfig, SchedulerEnv};
pub use coverage::{run_coverage, CoverageReport, MethodSummary, PairedComparison, TrialRecord};
pub use io::{load_risk_data, load_risk_matrix, write_risk_matrix, RiskData, RiskManifest};
pub use report::{histogram_csv, violin_csv, ReportOutcome};
