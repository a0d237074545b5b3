//! Exact two-level minimization over the four discourse variables.
//!
//! Prime implicants come from Quine-McCluskey merging of the ON and
//! don't-care minterms. The cover is chosen with Petrick's method: the
//! product-of-sums over ON minterms is expanded with absorption, which yields
//! every irredundant prime cover, and the cheapest one is kept.
//!
//! Cost order: total literal count, then number of terms, then the
//! lexicographically smallest sorted term list (M < A < U < H, positive
//! before negated).

use std::collections::BTreeSet;

use crate::error::LacanError;
use crate::model::{Label, LacanCode};

use super::expr::{verify_complementarity, BoolExpr, Classifier, Term};
use super::partition::PartitionTable;

fn check_disjoint(on_set: &BTreeSet<LacanCode>, dc_set: &BTreeSet<LacanCode>) -> Result<(), LacanError> {
    match on_set.intersection(dc_set).next() {
        Some(&code) => Err(LacanError::OverlappingSets(code)),
        None => Ok(()),
    }
}

/// All prime implicants of the function that covers at least one ON minterm.
/// Don't-cares take part in merging only.
pub fn prime_implicants(
    on_set: &BTreeSet<LacanCode>,
    dc_set: &BTreeSet<LacanCode>,
) -> Result<BTreeSet<Term>, LacanError> {
    check_disjoint(on_set, dc_set)?;

    let mut current: BTreeSet<(u8, u8)> = on_set.iter().chain(dc_set).map(|c| (0b1111, c.index())).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let cubes: Vec<(u8, u8)> = current.iter().copied().collect();
        let mut merged_flags = vec![false; cubes.len()];
        let mut next = BTreeSet::new();
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                let ((care_i, val_i), (care_j, val_j)) = (cubes[i], cubes[j]);
                let diff = val_i ^ val_j;
                if care_i == care_j && diff.count_ones() == 1 {
                    next.insert((care_i & !diff, val_i & !diff));
                    merged_flags[i] = true;
                    merged_flags[j] = true;
                }
            }
        }
        primes.extend(
            cubes
                .iter()
                .zip(&merged_flags)
                .filter(|(_, &merged)| !merged)
                .map(|(&(care, value), _)| Term::from_cube(care, value)),
        );
        current = next;
    }
    Ok(primes
        .into_iter()
        .filter(|t: &Term| on_set.iter().any(|&c| t.covers(c)))
        .collect())
}

fn cover_key(terms: &[Term]) -> (usize, usize, Vec<Term>) {
    let mut sorted = terms.to_vec();
    sorted.sort();
    (terms.iter().map(|t| t.len()).sum(), terms.len(), sorted)
}

/// Minimum-cost sum of products covering `on_set`, free to use `dc_set`.
pub fn minimize(on_set: &BTreeSet<LacanCode>, dc_set: &BTreeSet<LacanCode>) -> Result<BoolExpr, LacanError> {
    check_disjoint(on_set, dc_set)?;
    if on_set.is_empty() {
        return Err(LacanError::EmptyOnSet);
    }
    let primes: Vec<Term> = prime_implicants(on_set, dc_set)?.into_iter().collect();
    // At most 32 primes exist over 4 variables.
    assert!(primes.len() <= 64, "prime chart exceeds 64 columns");

    // Petrick: multiply out one clause per ON minterm, keeping only
    // inclusion-minimal products (absorption).
    let mut products: Vec<u64> = vec![0];
    for &code in on_set {
        let clause: Vec<u64> = primes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.covers(code))
            .map(|(i, _)| 1u64 << i)
            .collect();
        let mut expanded: Vec<u64> = products
            .iter()
            .flat_map(|&p| clause.iter().map(move |&bit| p | bit))
            .collect();
        expanded.sort_unstable_by_key(|p| (p.count_ones(), *p));
        expanded.dedup();
        let mut minimal: Vec<u64> = Vec::with_capacity(expanded.len());
        for p in expanded {
            if !minimal.iter().any(|&q| q & p == q) {
                minimal.push(p);
            }
        }
        products = minimal;
    }

    let best = products
        .iter()
        .map(|&mask| {
            (0..primes.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .collect::<Vec<_>>()
        })
        .min_by_key(|terms| cover_key(terms))
        .expect("a non-empty ON-set always has a prime cover");
    Ok(BoolExpr::from_terms(best))
}

/// How unobserved codes enter the two minimizations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DontCarePolicy {
    /// Don't-cares are free for both functions; if that makes the pair
    /// overlap, both are minimized again with don't-cares forced OFF.
    #[default]
    Free,
    /// Don't-cares are OFF for both functions.
    Off,
}

pub fn derive_classifier(partition: &PartitionTable) -> Result<Classifier, LacanError> {
    derive_classifier_with(partition, DontCarePolicy::Free)
}

pub fn derive_classifier_with(partition: &PartitionTable, policy: DontCarePolicy) -> Result<Classifier, LacanError> {
    let real = partition.codes_for(Label::Real);
    let fake = partition.codes_for(Label::Fake);
    for (label, codes) in [(Label::Real, &real), (Label::Fake, &fake)] {
        if codes.is_empty() {
            return Err(LacanError::EmptyClass(label));
        }
    }
    let none = BTreeSet::new();
    let dc = partition.dont_cares();
    if policy == DontCarePolicy::Free {
        let classifier = Classifier {
            expr0: minimize(&real, &dc)?,
            expr1: minimize(&fake, &dc)?,
        };
        if verify_complementarity(&classifier.expr0, &classifier.expr1).exclusive {
            return Ok(classifier);
        }
    }
    Ok(Classifier {
        expr0: minimize(&real, &none)?,
        expr1: minimize(&fake, &none)?,
    })
}
