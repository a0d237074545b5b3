//! Lacan engine checked against exhaustive enumeration over the 81 cubes of
//! four variables. The oracle below never calls the minimizer.

use std::collections::BTreeSet;

use discourse_core::lacan::{
    build_partition, builtin_classifier, classify_code, derive_classifier, derive_classifier_with, detect_ambiguities,
    minimize, prime_implicants, verify_complementarity, Annotation, BoolExpr, DontCarePolicy, PartitionTable, Verdict,
};
use discourse_core::{HeadlineId, Label, LacanCode};
use proptest::prelude::*;

const TABLE_REAL: [&str; 8] = ["0100", "0101", "0110", "1000", "1001", "1100", "1101", "1110"];
const TABLE_FAKE: [&str; 7] = ["0001", "0010", "0011", "0111", "1010", "1011", "1111"];

fn code(s: &str) -> LacanCode {
    s.parse().unwrap()
}

fn table() -> PartitionTable {
    PartitionTable::from_pairs(
        TABLE_REAL
            .iter()
            .map(|s| (code(s), Label::Real))
            .chain(TABLE_FAKE.iter().map(|s| (code(s), Label::Fake))),
    )
    .unwrap()
}

mod oracle {
    /// A cube as one of 0 / 1 / don't-care per variable (bit 3 = M .. bit 0 = H).
    #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
    pub struct Cube {
        pub digits: [u8; 4], // 0, 1 or 2 (absent)
    }

    impl Cube {
        pub fn contains(&self, minterm: u8) -> bool {
            (0..4).all(|i| {
                let bit = minterm >> (3 - i) & 1;
                self.digits[i] == 2 || self.digits[i] == bit
            })
        }

        pub fn literals(&self) -> usize {
            self.digits.iter().filter(|&&d| d != 2).count()
        }

        pub fn render(&self) -> String {
            let names = ['M', 'A', 'U', 'H'];
            let lits: Vec<String> = (0..4)
                .filter(|&i| self.digits[i] != 2)
                .map(|i| format!("{}{}", if self.digits[i] == 0 { "!" } else { "" }, names[i]))
                .collect();
            if lits.is_empty() {
                "1".into()
            } else {
                lits.join(".")
            }
        }
    }

    pub fn all_cubes() -> Vec<Cube> {
        let mut out = Vec::new();
        for n in 0..81u32 {
            let mut digits = [0u8; 4];
            let mut r = n;
            for d in digits.iter_mut() {
                *d = (r % 3) as u8;
                r /= 3;
            }
            out.push(Cube { digits });
        }
        out
    }

    /// Primes of the incompletely specified function that touch ON.
    pub fn primes(on: &[u8], dc: &[u8]) -> Vec<Cube> {
        let off: Vec<u8> = (0..16).filter(|m| !on.contains(m) && !dc.contains(m)).collect();
        let implicants: Vec<Cube> = all_cubes()
            .into_iter()
            .filter(|c| off.iter().all(|&m| !c.contains(m)))
            .collect();
        let contained_in = |a: &Cube, b: &Cube| (0..16u8).all(|m| !a.contains(m) || b.contains(m));
        let mut primes: Vec<Cube> = implicants
            .iter()
            .filter(|a| !implicants.iter().any(|b| b != *a && contained_in(a, b)))
            .filter(|a| on.iter().any(|&m| a.contains(m)))
            .copied()
            .collect();
        primes.sort();
        primes
    }

    /// Minimum literal cost over every prime cover of ON, found by branching
    /// on the primes that cover the first uncovered minterm.
    pub fn min_cover_cost(on: &[u8], dc: &[u8]) -> usize {
        let primes = primes(on, dc);
        fn go(on: &[u8], primes: &[Cube], chosen: &mut Vec<usize>, best: &mut usize) {
            let cost: usize = chosen.iter().map(|&i| primes[i].literals()).sum();
            let uncovered = on.iter().find(|&&m| !chosen.iter().any(|&i| primes[i].contains(m)));
            match uncovered {
                None => *best = (*best).min(cost),
                Some(&m) => {
                    for (i, p) in primes.iter().enumerate() {
                        if p.contains(m) && !chosen.contains(&i) {
                            chosen.push(i);
                            go(on, primes, chosen, best);
                            chosen.pop();
                        }
                    }
                }
            }
        }
        let mut best = usize::MAX;
        go(on, &primes, &mut Vec::new(), &mut best);
        best
    }
}

fn indices(set: &BTreeSet<LacanCode>) -> Vec<u8> {
    set.iter().map(|c| c.index()).collect()
}

fn rendered(primes: &BTreeSet<discourse_core::lacan::Term>) -> BTreeSet<String> {
    primes.iter().map(ToString::to_string).collect()
}

#[test]
fn table_primes_match_oracle() {
    let t = table();
    let dc = t.dont_cares();
    for label in Label::ALL {
        let on = t.codes_for(label);
        let expected: BTreeSet<String> = oracle::primes(&indices(&on), &indices(&dc)).iter().map(|c| c.render()).collect();
        assert_eq!(rendered(&prime_implicants(&on, &dc).unwrap()), expected);
    }
    // Frozen from the oracle: !U alone is not an implicant because 0001 is OFF.
    let on0 = t.codes_for(Label::Real);
    let primes0 = rendered(&prime_implicants(&on0, &dc).unwrap());
    let frozen: BTreeSet<String> = ["M.!U", "A.!U", "A.!H", "!U.!H"].map(String::from).into();
    assert_eq!(primes0, frozen);
    assert!(!primes0.contains("!U"));
}

#[test]
fn table_minimization_is_minimal_and_agrees_with_reference() {
    let t = table();
    let dc = t.dont_cares();
    let reference = builtin_classifier();
    for label in Label::ALL {
        let on = t.codes_for(label);
        let e = minimize(&on, &dc).unwrap();
        assert!(e.literal_cost() <= 7);
        assert_eq!(e.literal_cost(), oracle::min_cover_cost(&indices(&on), &indices(&dc)));
        for (c, _) in t.defined() {
            assert_eq!(e.eval(c), reference.expr(label).eval(c), "{label} disagrees on {c}");
        }
    }
}

#[test]
fn derived_table_classifier() {
    let c = derive_classifier(&table()).unwrap();
    assert_eq!(c.expr0, "M.!U + A.!U + A.!H".parse::<BoolExpr>().unwrap());
    assert_eq!(c.expr1, "!M.!A + !A.U + U.H".parse::<BoolExpr>().unwrap());
    let report = verify_complementarity(&c.expr0, &c.expr1);
    assert!(report.exclusive);
    assert!(report.abstain_codes.is_empty());

    // Forced OFF, 0000 stays unclassified like the reference pair.
    let off = derive_classifier_with(&table(), DontCarePolicy::Off).unwrap();
    assert_eq!((off.expr0.literal_cost(), off.expr1.literal_cost()), (6, 7));
    let report = verify_complementarity(&off.expr0, &off.expr1);
    assert!(report.exclusive);
    assert_eq!(report.abstain_codes, vec![code("0000")]);
}

#[test]
fn reference_pair_complementarity() {
    let c = builtin_classifier();
    let report = verify_complementarity(&c.expr0, &c.expr1);
    assert!(report.exclusive);
    assert!(report.conflict_codes.is_empty());
    assert_eq!(report.abstain_codes, vec![code("0000")]);
}

#[test]
fn reference_pair_classifies_the_table() {
    let c = builtin_classifier();
    for (k, label) in table().defined() {
        assert_eq!(classify_code(k, &c).unwrap(), Verdict::from(label));
    }
    assert_eq!(classify_code(code("0000"), &c).unwrap(), Verdict::Abstain);
}

#[test]
fn analyst_without_university_is_real_and_vice_versa() {
    let c = builtin_classifier();
    for (k, _) in table().defined() {
        if k.a() && !k.u() {
            assert_eq!(classify_code(k, &c).unwrap(), Verdict::Real);
        }
        if !k.a() && k.u() {
            assert_eq!(classify_code(k, &c).unwrap(), Verdict::Fake);
        }
    }
}

#[test]
fn table_annotations_build_the_table() {
    let annotations: Vec<Annotation> = (0..300u64)
        .map(|i| {
            let (s, label) = if i % 2 == 0 {
                (TABLE_REAL[(i / 2) as usize % 8], Label::Real)
            } else {
                (TABLE_FAKE[(i / 2) as usize % 7], Label::Fake)
            };
            Annotation::new(HeadlineId(i), code(s), label)
        })
        .collect();
    assert!(detect_ambiguities(&annotations).unwrap().is_empty());
    let p = build_partition(&annotations).unwrap();
    assert_eq!(p, table());
    assert_eq!(p.codes_for(Label::Real).len(), 8);
    assert_eq!(p.codes_for(Label::Fake).len(), 7);
    assert_eq!(p.dont_cares(), [code("0000")].into());
}

fn partial_function() -> impl Strategy<Value = Vec<Option<Label>>> {
    prop::collection::vec(
        prop_oneof![Just(None), Just(Some(Label::Real)), Just(Some(Label::Fake))],
        16,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn minimize_is_exact_and_minimal(assign in prop::collection::vec(0u8..3, 16)) {
        // 0 = ON, 1 = DC, 2 = OFF
        let on: BTreeSet<LacanCode> = (0..16).filter(|&i| assign[i as usize] == 0).map(|i| LacanCode::from_index(i).unwrap()).collect();
        let dc: BTreeSet<LacanCode> = (0..16).filter(|&i| assign[i as usize] == 1).map(|i| LacanCode::from_index(i).unwrap()).collect();
        prop_assume!(!on.is_empty());
        let e = minimize(&on, &dc).unwrap();
        for c in LacanCode::all() {
            if on.contains(&c) { prop_assert!(e.eval(c)); }
            if !on.contains(&c) && !dc.contains(&c) { prop_assert!(!e.eval(c)); }
        }
        prop_assert_eq!(e.literal_cost(), oracle::min_cover_cost(&indices(&on), &indices(&dc)));
        let expected: BTreeSet<String> = oracle::primes(&indices(&on), &indices(&dc)).iter().map(|c| c.render()).collect();
        prop_assert_eq!(rendered(&prime_implicants(&on, &dc).unwrap()), expected);
        // every chosen term is prime
        for t in e.terms() {
            prop_assert!(prime_implicants(&on, &dc).unwrap().contains(&t));
        }
    }

    #[test]
    fn derived_classifier_reproduces_partition(f in partial_function()) {
        let pairs: Vec<(LacanCode, Label)> = f.iter().enumerate()
            .filter_map(|(i, l)| l.map(|l| (LacanCode::from_index(i as u8).unwrap(), l)))
            .collect();
        let p = PartitionTable::from_pairs(pairs).unwrap();
        prop_assume!(!p.codes_for(Label::Real).is_empty() && !p.codes_for(Label::Fake).is_empty());
        let c = derive_classifier(&p).unwrap();
        prop_assert!(verify_complementarity(&c.expr0, &c.expr1).exclusive);
        for (k, label) in p.defined() {
            prop_assert_eq!(classify_code(k, &c).unwrap(), Verdict::from(label));
        }
    }
}
