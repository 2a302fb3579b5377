//! Free-product certification: the constants of Theorems 1 and 2, syllable
//! paths and their overlaps, the brute-force oracle, the abstract Ping-Pong
//! Lemma and the Schottky power search.

mod abstract_pp;
mod certify;
mod constants;
mod instance;
mod oracle;
mod paths;
mod schottky;

pub use abstract_pp::{
    abstract_ping_pong_check, free_left_multiplication_instance, index_two_instance, AbstractElement,
    AbstractPingPongInstance, PingPongOutcome,
};
pub use certify::{
    certify, certify_theorem1, certify_theorem2, estimate_join_quasiconvexity, Certificate, CertifyOptions, Constants,
    Gate, GateOutcome, Provenance, SubgroupsSummary, SweepRecord, Tagged, Verdict, CERTIFICATE_SCHEMA,
};
pub use constants::{
    compute_c, count_a, local_to_global, short_element_condition, LgeResult, LgeStrategy, ShortElements,
};
pub use instance::{PingPongInstance, Side, SyllableSet, TheoremMode};
pub use oracle::{oracle_free_product_check, OracleOutcome, OracleRecord, ORACLE_BUDGET};
pub use paths::{
    assemble_syllable_path, enumerate_tuples, measure_overlaps, sample_tuples, tuple_factors, OverlapReport,
    SyllablePath, SyllableTuple,
};
pub use schottky::{schottky_power_search, SchottkyOutcome};
