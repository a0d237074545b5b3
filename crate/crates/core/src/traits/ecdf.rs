use serde::Serialize;

use crate::error::TraitError;
use crate::model::{Dataset, Label, Trait};

/// Empirical CDF over probability-valued samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: impl IntoIterator<Item = f64>) -> Result<Self, TraitError> {
        let mut sorted: Vec<f64> = samples.into_iter().collect();
        if let Some(&bad) = sorted.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(TraitError::BadSample(bad));
        }
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of samples `<= a`.
    pub fn count_le(&self, a: f64) -> usize {
        self.sorted.partition_point(|&x| x <= a)
    }

    /// `#{x <= a} / n`.
    pub fn value(&self, a: f64) -> Result<f64, TraitError> {
        if self.sorted.is_empty() {
            return Err(TraitError::EmptySample);
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(TraitError::PointOutOfRange(a));
        }
        Ok(self.count_le(a) as f64 / self.sorted.len() as f64)
    }
}

pub fn ecdf_value(cdf: &EmpiricalCdf, a: f64) -> Result<f64, TraitError> {
    cdf.value(a)
}

/// The CDFs of one trait among Real and among Fake records.
pub fn conditional_cdfs(dataset: &Dataset, t: Trait) -> Result<(EmpiricalCdf, EmpiricalCdf), TraitError> {
    let mut by_label = [Vec::new(), Vec::new()];
    for r in dataset.records() {
        let tv = r.traits.ok_or(TraitError::MissingTraits(r.id()))?;
        by_label[usize::from(r.label().code())].push(tv.get(t));
    }
    for label in Label::ALL {
        if by_label[usize::from(label.code())].is_empty() {
            return Err(TraitError::SingleClassDataset(label.other()));
        }
    }
    let [real, fake] = by_label;
    Ok((EmpiricalCdf::new(real)?, EmpiricalCdf::new(fake)?))
}

/// `P(label = v | x <= a) = c_v / (c_0 + c_1)` where `c_v` is the CDF of the
/// trait among records with label `v`, evaluated at `a`.
pub fn posterior(c0: f64, c1: f64, v: Label) -> Result<f64, TraitError> {
    if c0 < 0.0 || c1 < 0.0 {
        return Err(TraitError::NegativeCdf);
    }
    let total = c0 + c1;
    if total <= 0.0 {
        return Err(TraitError::UndefinedPosterior);
    }
    Ok(match v {
        Label::Real => c0 / total,
        Label::Fake => c1 / total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub a: f64,
    pub cdf_label0: f64,
    pub cdf_label1: f64,
    /// `(P(Real | x <= a), P(Fake | x <= a))`, absent below both supports.
    pub posterior: Option<(f64, f64)>,
}

/// `0.00, 0.01, ..., 1.00`.
pub fn default_grid() -> Vec<f64> {
    (0..=100).map(|i| f64::from(i) / 100.0).collect()
}

pub fn posterior_curve(dataset: &Dataset, t: Trait, grid: &[f64]) -> Result<Vec<CurvePoint>, TraitError> {
    if grid.iter().any(|a| !(0.0..=1.0).contains(a)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TraitError::BadGrid);
    }
    let (cdf0, cdf1) = conditional_cdfs(dataset, t)?;
    grid.iter()
        .map(|&a| {
            let (c0, c1) = (cdf0.value(a)?, cdf1.value(a)?);
            let posterior = match (posterior(c0, c1, Label::Real), posterior(c0, c1, Label::Fake)) {
                (Ok(p0), Ok(p1)) => Some((p0, p1)),
                (Err(TraitError::UndefinedPosterior), _) => None,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            Ok(CurvePoint {
                a,
                cdf_label0: c0,
                cdf_label1: c1,
                posterior,
            })
        })
        .collect()
}
