//! Verification suites for tangential maximal operators: configuration,
//! seeded test functions, the suites themselves and report output.

// negated comparisons reject NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod family;
pub mod report;
pub mod suites;

pub use config::{ExperimentConfig, Suite};
pub use report::{ExperimentReport, Verdict};
pub use suites::run;
