use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Dataset, Headline, Label, Record, TraitVector};

/// Source of trait scores for a headline.
pub trait TraitScorer {
    fn score(&self, headline: &Headline) -> TraitVector;
}

/// Seeded stand-in for an external personality model.
///
/// Each headline draws four uniforms from its own ChaCha stream (keyed by
/// seed and headline id), so scores do not depend on dataset order. With
/// `shift = s`, Real scores land in `[0, 1 - s)` and Fake scores in
/// `[s, 1)`; `s = 0` makes traits independent of the label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticScorer {
    seed: u64,
    shift: f64,
}

impl SyntheticScorer {
    pub fn null(seed: u64) -> Self {
        SyntheticScorer { seed, shift: 0.0 }
    }

    /// `shift` is clamped to `[0, 1)`.
    pub fn shifted(seed: u64, shift: f64) -> Self {
        SyntheticScorer {
            seed,
            shift: if shift.is_finite() { shift.clamp(0.0, 0.999_999) } else { 0.0 },
        }
    }
}

impl TraitScorer for SyntheticScorer {
    fn score(&self, headline: &Headline) -> TraitVector {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(headline.id.0);
        let offset = match headline.label {
            Label::Real => 0.0,
            Label::Fake => self.shift,
        };
        let mut draw = || offset + rng.random::<f64>() * (1.0 - self.shift);
        let (ei, sn, tf, jp) = (draw(), draw(), draw(), draw());
        TraitVector::new(ei, sn, tf, jp).expect("draws lie in [0, 1)")
    }
}

/// Replaces every record's traits with the scorer's output.
pub fn attach_traits(dataset: &Dataset, scorer: &dyn TraitScorer) -> Dataset {
    let records: Vec<Record> = dataset
        .records()
        .iter()
        .map(|r| r.clone().with_traits(scorer.score(&r.headline)))
        .collect();
    Dataset::new(records).expect("ids unchanged")
}
