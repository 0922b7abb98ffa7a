//! Distribution-free hyperparameter calibration.
//!
//! Given the risk of every point of a finite hyperparameter grid on `n`
//! calibration episodes, this crate returns the subset of the grid that is
//! certified, with probability at least `1 - δ` over the calibration data, to
//! keep either the average risk (LTT) or the `q`-quantile of the risk (QLTT)
//! at or below a target `α`.
//!
//! * [`pvalue`]: Hoeffding and order-statistic p-values.
//! * [`fwer`]: Bonferroni and fixed sequence testing.
//! * [`calibrate`]: the end-to-end drivers.
//! * [`envs`]: synthetic risk families with known ground truth and a toy
//!   downlink scheduler that produces delay risks.
//! * [`harness`]: configs, file formats, coverage experiments and figure data.

pub mod calibrate;
pub mod control;
pub mod envs;
pub mod error;
pub mod fwer;
pub mod grid;
pub mod harness;
pub mod pvalue;
pub mod risk;
pub mod seed;

pub use calibrate::{calibrate, ltt_calibrate, qltt_calibrate, select_best};
pub use control::{CalibrationResult, ControlSpec, FwerProcedure, Method};
pub use error::{Error, Result};
pub use grid::{HyperGrid, HyperPoint};
pub use risk::{validate_risk_matrix, RewardMatrix, RiskMatrix};
