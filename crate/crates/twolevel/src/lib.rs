//! Std companion to `twolevel-core`: Matrix Market files, the plan text
//! format, threaded wall-clock execution, CSV reports and the experiment
//! drivers used by the `twolevel` binary.

pub mod error;
pub mod experiment;
pub mod mtx;
pub mod plan_io;
pub mod report;
pub mod wallclock;

pub use error::AppError;
