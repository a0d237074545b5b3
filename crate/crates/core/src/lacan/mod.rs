//! Boolean classifiers over Lacan codes: evaluation, ambiguity detection,
//! partition building and exact minimization.

mod expr;
mod minimize;
mod partition;

pub use expr::{
    builtin_classifier, classify_code, eval_expr, verify_complementarity, BoolExpr, Classifier,
    ComplementarityReport, Literal, Term, Verdict,
};
pub use minimize::{derive_classifier, derive_classifier_with, minimize, prime_implicants, DontCarePolicy};
pub use partition::{
    build_partition, detect_ambiguities, AmbiguityEntry, AmbiguityReport, Annotation, PartitionTable,
};
