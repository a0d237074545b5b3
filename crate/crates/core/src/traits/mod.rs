//! Conditional ECDFs, Bayes posteriors and threshold rules over trait scores.

mod ecdf;
mod rules;
mod scorer;

pub use ecdf::{conditional_cdfs, default_grid, ecdf_value, posterior, posterior_curve, CurvePoint, EmpiricalCdf};
pub use rules::{
    apply_rule, evaluate_rule, RuleKind, RuleMetrics, RuleOutcome, RuleSpec, DEFAULT_THRESHOLD, SCREENED_TRAITS,
};
pub use scorer::{attach_traits, SyntheticScorer, TraitScorer};
