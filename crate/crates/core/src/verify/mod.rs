//! Experiment harness: scaling studies with verdicts, empirical
//! operator-norm lower bounds, and the TOML-driven suite of checks.

mod bound;
mod checks;
mod study;
mod suite;

pub use bound::{operator_norm_lower_bound, standard_probes, CommutatorKind, NormBound, Probe};
pub use checks::{run_check, CheckInputs, CheckName, CheckParams};
pub use study::{
    classify, discriminate, scaling_study, study_values, AxisPair, ExperimentConfig, Thresholds,
    Verdict, VerdictReport, MIN_AXIS_POINTS,
};
pub use suite::{
    parse_suite, run_suite, run_suite_config, CheckConfig, SuiteConfig, SuiteEntry, SuiteReport,
    DEFAULT_SUITE,
};
