//! Threshold rules over trait vectors and their accuracy accounting.
//!
//! A trait is *low* when it is strictly below the threshold. JP only counts
//! toward the global rules; the single-trait rules look at EI, SN and TF.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::TraitError;
use crate::model::{Dataset, Label, Trait, TraitVector};

pub const DEFAULT_THRESHOLD: f64 = 0.25;

/// Traits examined by the single-trait rules.
pub const SCREENED_TRAITS: [Trait; 3] = [Trait::Ei, Trait::Sn, Trait::Tf];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Real iff more than `k` of the four traits are low.
    GlobalCount(u8),
    /// Real iff this trait is low and the other screened traits are not.
    SingleLow(Trait),
    /// Real iff some `SingleLow` condition holds.
    AnyLow,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::GlobalCount(k) => write!(f, "global>{k}"),
            RuleKind::SingleLow(t) => write!(f, "low_{}", t.name().to_ascii_lowercase()),
            RuleKind::AnyLow => f.write_str("any_low"),
        }
    }
}

impl FromStr for RuleKind {
    type Err = TraitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("global>") {
            return k
                .parse()
                .map(RuleKind::GlobalCount)
                .map_err(|_| TraitError::UnknownRule(s.to_owned()));
        }
        if let Some(t) = s.strip_prefix("low_") {
            return t
                .parse()
                .map(RuleKind::SingleLow)
                .map_err(|_| TraitError::UnknownRule(s.to_owned()));
        }
        match s {
            "any_low" => Ok(RuleKind::AnyLow),
            _ => Err(TraitError::UnknownRule(s.to_owned())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleSpec {
    kind: RuleKind,
    threshold: f64,
}

impl RuleSpec {
    pub fn new(kind: RuleKind, threshold: f64) -> Result<Self, TraitError> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(TraitError::BadThreshold(threshold));
        }
        match kind {
            RuleKind::GlobalCount(k) if !(1..=3).contains(&k) => return Err(TraitError::BadCount(k)),
            RuleKind::SingleLow(t) if !SCREENED_TRAITS.contains(&t) => {
                return Err(TraitError::UnknownRule(kind.to_string()))
            }
            _ => {}
        }
        Ok(RuleSpec { kind, threshold })
    }

    /// The seven rules: global counts 1..=3, low EI/SN/TF, any low.
    pub fn standard_suite(threshold: f64) -> Result<Vec<RuleSpec>, TraitError> {
        let kinds = (1..=3)
            .map(RuleKind::GlobalCount)
            .chain(SCREENED_TRAITS.map(RuleKind::SingleLow))
            .chain([RuleKind::AnyLow]);
        kinds.map(|k| RuleSpec::new(k, threshold)).collect()
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    fn is_low(&self, tv: &TraitVector, t: Trait) -> bool {
        tv.get(t) < self.threshold
    }

    fn single_low_holds(&self, tv: &TraitVector, t: Trait) -> bool {
        self.is_low(tv, t) && SCREENED_TRAITS.iter().filter(|&&o| o != t).all(|&o| !self.is_low(tv, o))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    pub prediction: Label,
    pub in_population: bool,
}

pub fn apply_rule(rule: &RuleSpec, tv: &TraitVector) -> RuleOutcome {
    let real_if = |cond: bool| if cond { Label::Real } else { Label::Fake };
    match rule.kind {
        RuleKind::GlobalCount(k) => {
            let low = Trait::ALL.iter().filter(|&&t| rule.is_low(tv, t)).count();
            RuleOutcome {
                prediction: real_if(low > usize::from(k)),
                in_population: true,
            }
        }
        RuleKind::SingleLow(t) => RuleOutcome {
            prediction: real_if(rule.single_low_holds(tv, t)),
            in_population: rule.is_low(tv, t),
        },
        RuleKind::AnyLow => RuleOutcome {
            prediction: real_if(SCREENED_TRAITS.iter().any(|&t| rule.single_low_holds(tv, t))),
            in_population: SCREENED_TRAITS.iter().any(|&t| rule.is_low(tv, t)),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleMetrics {
    pub rule: String,
    pub threshold: f64,
    pub population: usize,
    pub predictions: usize,
    pub errors: usize,
    pub correct: usize,
    /// Percentage rounded to two decimals; null when nothing was predicted.
    pub accuracy_pct: Option<f64>,
}

impl RuleMetrics {
    fn from_counts(rule: &RuleSpec, population: usize, correct: usize, errors: usize) -> Self {
        let predictions = correct + errors;
        let accuracy_pct = (predictions > 0).then(|| (correct as f64 / predictions as f64 * 10_000.0).round() / 100.0);
        RuleMetrics {
            rule: rule.kind.to_string(),
            threshold: rule.threshold,
            population,
            predictions,
            errors,
            correct,
            accuracy_pct,
        }
    }

    /// Full-precision `correct / predictions`.
    pub fn accuracy(&self) -> Option<f64> {
        (self.predictions > 0).then(|| self.correct as f64 / self.predictions as f64)
    }
}

/// Scores a rule against ground truth over its population: every record for
/// the global rules, records with a low screened trait otherwise.
pub fn evaluate_rule(rule: &RuleSpec, dataset: &Dataset) -> Result<RuleMetrics, TraitError> {
    let (mut population, mut correct, mut errors) = (0, 0, 0);
    for r in dataset.records() {
        let tv = r.traits.ok_or(TraitError::MissingTraits(r.id()))?;
        let outcome = apply_rule(rule, &tv);
        if !outcome.in_population {
            continue;
        }
        population += 1;
        if outcome.prediction == r.label() {
            correct += 1;
        } else {
            errors += 1;
        }
    }
    Ok(RuleMetrics::from_counts(rule, population, correct, errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Headline, HeadlineId, Record};

    fn tv(ei: f64, sn: f64, tf: f64, jp: f64) -> TraitVector {
        TraitVector::new(ei, sn, tf, jp).unwrap()
    }

    fn rule(kind: RuleKind) -> RuleSpec {
        RuleSpec::new(kind, DEFAULT_THRESHOLD).unwrap()
    }

    #[test]
    fn global_count_examples() {
        let out = apply_rule(&rule(RuleKind::GlobalCount(1)), &tv(0.1, 0.1, 0.9, 0.9));
        assert_eq!(out, RuleOutcome { prediction: Label::Real, in_population: true });
        let out = apply_rule(&rule(RuleKind::GlobalCount(1)), &tv(0.9, 0.9, 0.9, 0.9));
        assert_eq!(out.prediction, Label::Fake);
        // JP counts toward the global tally.
        let out = apply_rule(&rule(RuleKind::GlobalCount(1)), &tv(0.1, 0.9, 0.9, 0.1));
        assert_eq!(out.prediction, Label::Real);
    }

    #[test]
    fn threshold_tie_is_not_low() {
        let out = apply_rule(&rule(RuleKind::GlobalCount(1)), &tv(0.25, 0.25, 0.25, 0.25));
        assert_eq!(out.prediction, Label::Fake);
        let out = apply_rule(&rule(RuleKind::SingleLow(Trait::Ei)), &tv(0.25, 0.9, 0.9, 0.9));
        assert!(!out.in_population);
    }

    #[test]
    fn single_low_examples() {
        let r = rule(RuleKind::SingleLow(Trait::Ei));
        assert_eq!(
            apply_rule(&r, &tv(0.1, 0.9, 0.9, 0.5)),
            RuleOutcome { prediction: Label::Real, in_population: true }
        );
        // Low EI but SN also low: in the population, predicted Fake.
        assert_eq!(
            apply_rule(&r, &tv(0.1, 0.1, 0.9, 0.5)),
            RuleOutcome { prediction: Label::Fake, in_population: true }
        );
        assert!(!apply_rule(&r, &tv(0.5, 0.1, 0.9, 0.5)).in_population);
        // JP never blocks a single-trait rule.
        assert_eq!(apply_rule(&r, &tv(0.1, 0.9, 0.9, 0.0)).prediction, Label::Real);
    }

    #[test]
    fn any_low_examples() {
        let r = rule(RuleKind::AnyLow);
        assert_eq!(apply_rule(&r, &tv(0.9, 0.1, 0.9, 0.9)).prediction, Label::Real);
        assert_eq!(
            apply_rule(&r, &tv(0.1, 0.1, 0.9, 0.9)),
            RuleOutcome { prediction: Label::Fake, in_population: true }
        );
        assert!(!apply_rule(&r, &tv(0.9, 0.9, 0.9, 0.1)).in_population);
    }

    #[test]
    fn rule_spec_validation() {
        assert!(RuleSpec::new(RuleKind::GlobalCount(0), 0.25).is_err());
        assert!(RuleSpec::new(RuleKind::GlobalCount(4), 0.25).is_err());
        assert!(RuleSpec::new(RuleKind::SingleLow(Trait::Jp), 0.25).is_err());
        assert!(RuleSpec::new(RuleKind::AnyLow, 0.0).is_err());
        assert!(RuleSpec::new(RuleKind::AnyLow, 1.0).is_err());
        assert!(RuleSpec::new(RuleKind::AnyLow, f64::NAN).is_err());
        assert_eq!(RuleSpec::standard_suite(0.25).unwrap().len(), 7);
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleSpec::standard_suite(0.25).unwrap() {
            assert_eq!(r.kind().to_string().parse::<RuleKind>().unwrap(), r.kind());
        }
        assert!("global>x".parse::<RuleKind>().is_err());
        assert!("nope".parse::<RuleKind>().is_err());
    }

    #[test]
    fn perfect_predictions() {
        let rows = [(tv(0.1, 0.1, 0.9, 0.9), Label::Real), (tv(0.9, 0.9, 0.9, 0.9), Label::Fake)];
        let d = Dataset::new(
            rows.iter()
                .enumerate()
                .map(|(i, (t, l))| Record::new(Headline::new(HeadlineId(i as u64), "x", *l).unwrap()).with_traits(*t))
                .collect(),
        )
        .unwrap();
        let m = evaluate_rule(&rule(RuleKind::GlobalCount(1)), &d).unwrap();
        assert_eq!((m.population, m.predictions, m.errors, m.correct), (2, 2, 0, 2));
        assert_eq!(m.accuracy(), Some(1.0));
        assert_eq!(m.accuracy_pct, Some(100.0));
    }

    #[test]
    fn empty_population_has_no_accuracy() {
        let d = Dataset::new(vec![
            Record::new(Headline::new(HeadlineId(0), "x", Label::Real).unwrap()).with_traits(tv(0.9, 0.9, 0.9, 0.9)),
        ])
        .unwrap();
        let m = evaluate_rule(&rule(RuleKind::SingleLow(Trait::Sn)), &d).unwrap();
        assert_eq!((m.population, m.predictions), (0, 0));
        assert_eq!(m.accuracy(), None);
        assert_eq!(m.accuracy_pct, None);
    }

    #[test]
    fn missing_traits_error() {
        let d = Dataset::new(vec![Record::new(Headline::new(HeadlineId(5), "x", Label::Real).unwrap())]).unwrap();
        assert_eq!(
            evaluate_rule(&rule(RuleKind::AnyLow), &d),
            Err(TraitError::MissingTraits(HeadlineId(5)))
        );
    }
}
