//! Empirical check harness.
//!
//! Everything measurable lives here: the forcing norm `S`, the double-ball,
//! critical-density, power-decay, and Harnack-quotient checks on solved
//! problems, the seeded suite ensembles, plain-text configuration, and the
//! versioned JSON report types.

pub mod checks;
pub mod config;
pub mod full;
pub mod report;
pub mod suite;

pub use checks::{
    check_critical_density, check_double_ball, check_harnack, check_power_decay,
    harnack_quotient, s_norm, CdCheckParams, DbCheckParams, HarnackParams, PdCheckParams,
};
pub use config::{parse_window, Config};
pub use full::{run_full, Chapter, FullParams, FullReport};
pub use report::{CheckReport, SCHEMA_VERSION};
pub use suite::{
    run_metamorphic, run_suite, MetamorphicReport, SuiteParams, SuiteReport,
};
