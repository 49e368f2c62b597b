//! Experiment configuration, state families, the security pipeline and the
//! lemma verification suite, with JSON/CSV reporting.

mod config;
mod report;
mod security;
mod states;
mod suite;

pub use config::{
    derive_seed, CliffordMode, ExperimentConfig, StateFamily, Tolerances, DEFAULT_SAMPLES,
    MAX_QUERIES,
};
pub use report::{
    CheckParams, CheckRecord, DeficitEntry, ExperimentReport, Quantity, Relation, CSV_COLUMNS,
    SCHEMA,
};
pub use security::{isotypic_weights, run_security_experiment, run_sweep, trace_distance_fr_hr};
pub use states::{
    build_state, build_state_for_dim, distinct_tuples, gentle_normalize, tensor_power_state,
    trace_norm_or_bound, GentleNormalization, EXACT_TRACE_NORM_DIM, MIN_ACCEPTANCE,
};
pub use suite::{known_check_ids, run_lemma_suite, SuiteConfig};
