//! Loading, cleaning and splitting the headline CSV.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::model::{Dataset, Headline, HeadlineId, Label, Record, Trait, TraitVector};

pub const DEFAULT_MIN_WORDS: usize = 4;

/// Column names used to read the input CSV.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSchema {
    /// When set, ids are read from this column instead of the row ordinal.
    pub id: Option<String>,
    pub headline: String,
    pub label: String,
    /// Trait columns in EI, SN, TF, JP order.
    pub traits: [String; 4],
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            id: None,
            headline: "headline".into(),
            label: "label".into(),
            traits: Trait::ALL.map(|t| t.name().to_owned()),
        }
    }
}

impl ColumnSchema {
    /// Schema of the cleaned dataset written by `prepare`.
    pub fn prepared() -> Self {
        ColumnSchema {
            id: Some("id".into()),
            ..ColumnSchema::default()
        }
    }
}

/// Reads the headline CSV. Row `i` (0-based, header excluded) gets id `i`
/// unless the schema names an id column; errors report that same ordinal.
///
/// A trait vector is attached only when all four trait columns exist and the
/// row has a value in each of them. Unparseable or out-of-range values fail.
pub fn load_dataset(path: &Path, schema: &ColumnSchema) -> Result<Dataset, IngestError> {
    if !path.exists() {
        return Err(IngestError::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let require = |name: &str| column(name).ok_or_else(|| IngestError::MissingColumn(name.to_owned()));

    let headline_col = require(&schema.headline)?;
    let label_col = require(&schema.label)?;
    let id_col = schema.id.as_deref().map(require).transpose()?;
    let trait_cols: Option<Vec<usize>> = schema.traits.iter().map(|c| column(c)).collect();

    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let row = row as u64;
        let fields = result?;
        let get = |i: usize| fields.get(i).unwrap_or("").trim();

        let id = match id_col {
            Some(c) => HeadlineId(get(c).parse().map_err(|_| IngestError::BadIdValue {
                row,
                value: get(c).to_owned(),
            })?),
            None => HeadlineId(row),
        };
        let label: Label = get(label_col).parse().map_err(|_| IngestError::BadLabelValue {
            row,
            value: get(label_col).to_owned(),
        })?;
        let headline = Headline::new(id, get(headline_col), label)
            .map_err(|source| IngestError::Record { row, source })?;
        let mut record = Record::new(headline);

        if let Some(cols) = &trait_cols {
            let raw: Vec<&str> = cols.iter().map(|&c| get(c)).collect();
            if raw.iter().all(|v| !v.is_empty()) {
                let mut values = [0.0; 4];
                for (k, (value, name)) in raw.iter().zip(&schema.traits).enumerate() {
                    values[k] = value
                        .parse::<f64>()
                        .ok()
                        .filter(|v| (0.0..=1.0).contains(v))
                        .ok_or_else(|| IngestError::BadTraitValue {
                            row,
                            column: name.clone(),
                            value: value.to_string(),
                        })?;
                }
                let [ei, sn, tf, jp] = values;
                record.traits = Some(TraitVector::new(ei, sn, tf, jp)?);
            }
        }
        records.push(record);
    }
    Ok(Dataset::new(records)?)
}

/// Writes a dataset in the cleaned-dataset schema (`id,headline,label[,EI,SN,TF,JP]`).
pub fn write_dataset(dataset: &Dataset, path: &Path) -> Result<(), IngestError> {
    let with_traits = !dataset.is_empty() && dataset.records().iter().all(|r| r.traits.is_some());
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["id", "headline", "label"];
    if with_traits {
        header.extend(Trait::ALL.map(Trait::name));
    }
    writer.write_record(&header)?;
    for r in dataset.records() {
        let mut row = vec![
            r.id().to_string(),
            r.headline.text().to_owned(),
            r.label().code().to_string(),
        ];
        if let (true, Some(tv)) = (with_traits, r.traits) {
            row.extend(Trait::ALL.map(|t| tv.get(t).to_string()));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Drops headlines with fewer than `min_words` whitespace-separated tokens.
pub fn filter_short(dataset: &Dataset, min_words: usize) -> Dataset {
    let min_words = min_words.max(1);
    dataset.filtered(|r| r.headline.word_count() >= min_words)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DedupeOutcome {
    pub dataset: Dataset,
    pub removed: usize,
    /// Dropped duplicates whose label differed from the retained first copy.
    pub label_conflicts: usize,
}

/// Keeps the first record of each distinct text.
pub fn dedupe(dataset: &Dataset) -> DedupeOutcome {
    let mut first: HashMap<&str, Label> = HashMap::new();
    let mut keep = HashSet::new();
    let mut label_conflicts = 0;
    for r in dataset.records() {
        match first.get(r.headline.text()) {
            None => {
                first.insert(r.headline.text(), r.label());
                keep.insert(r.id());
            }
            Some(&label) if label != r.label() => label_conflicts += 1,
            Some(_) => {}
        }
    }
    let deduped = dataset.filtered(|r| keep.contains(&r.id()));
    DedupeOutcome {
        removed: dataset.len() - deduped.len(),
        dataset: deduped,
        label_conflicts,
    }
}

/// Test-set fraction as an exact rational so the test size is reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction(Ratio<u64>);

impl Fraction {
    pub fn new(numer: u64, denom: u64) -> Result<Self, IngestError> {
        if denom == 0 || numer == 0 || numer >= denom {
            return Err(IngestError::BadFraction(format!("{numer}/{denom}")));
        }
        Ok(Fraction(Ratio::new(numer, denom)))
    }

    /// `round_half_up(self * n)`.
    pub fn apply(self, n: usize) -> usize {
        let (p, q) = (u128::from(*self.0.numer()), u128::from(*self.0.denom()));
        ((2 * p * n as u128 + q) / (2 * q)) as usize
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl Default for Fraction {
    fn default() -> Self {
        Fraction(Ratio::new(2, 5))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl std::str::FromStr for Fraction {
    type Err = IngestError;

    /// Accepts a plain decimal (`0.40`) or `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || IngestError::BadFraction(s.to_owned());
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            return Fraction::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if int.is_empty() && frac.is_empty() || !all_digits(int) || !all_digits(frac) || frac.len() > 18 {
            return Err(bad());
        }
        let denom = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_val: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let numer = int.checked_mul(denom).and_then(|v| v.checked_add(frac_val)).ok_or_else(bad)?;
        Fraction::new(numer, denom).map_err(|_| bad())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SplitSpec {
    pub test_fraction: Fraction,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub test: Dataset,
    pub eval: Dataset,
}

/// Seeded, unstratified test/evaluation split. Both halves keep source order.
pub fn split(dataset: &Dataset, spec: SplitSpec) -> Result<Split, IngestError> {
    if dataset.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);
    let test_size = spec.test_fraction.apply(dataset.len());
    let mut in_test = vec![false; dataset.len()];
    for &i in &order[..test_size] {
        in_test[i] = true;
    }
    let mut flags = in_test.iter();
    let test = dataset.filtered(|_| *flags.next().unwrap());
    let mut flags = in_test.iter();
    let eval = dataset.filtered(|_| !*flags.next().unwrap());
    Ok(Split { test, eval })
}

/// Replayable description of a split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub test_fraction: f64,
    pub test_ids: Vec<HeadlineId>,
    pub eval_ids: Vec<HeadlineId>,
}

impl SplitManifest {
    pub fn new(spec: SplitSpec, split: &Split) -> Self {
        SplitManifest {
            seed: spec.seed,
            test_fraction: spec.test_fraction.to_f64(),
            test_ids: split.test.ids().collect(),
            eval_ids: split.eval.ids().collect(),
        }
    }

    /// Rebuilds the split from the listed ids. The manifest must cover the
    /// dataset exactly.
    pub fn apply(&self, dataset: &Dataset) -> Result<Split, IngestError> {
        let test: HashSet<_> = self.test_ids.iter().copied().collect();
        let eval: HashSet<_> = self.eval_ids.iter().copied().collect();
        if test.len() != self.test_ids.len() || eval.len() != self.eval_ids.len() {
            return Err(IngestError::ManifestMismatch("repeated id".into()));
        }
        if let Some(id) = test.intersection(&eval).next() {
            return Err(IngestError::ManifestMismatch(format!("id {id} listed in both halves")));
        }
        if test.len() + eval.len() != dataset.len() {
            return Err(IngestError::ManifestMismatch(format!(
                "manifest lists {} ids, dataset has {}",
                test.len() + eval.len(),
                dataset.len()
            )));
        }
        if let Some(id) = dataset.ids().find(|id| !test.contains(id) && !eval.contains(id)) {
            return Err(IngestError::ManifestMismatch(format!("id {id} not listed")));
        }
        Ok(Split {
            test: dataset.filtered(|r| test.contains(&r.id())),
            eval: dataset.filtered(|r| eval.contains(&r.id())),
        })
    }
}

/// Splits a dataset into its Real and Fake records.
pub fn partition_by_label(dataset: &Dataset) -> (Dataset, Dataset) {
    (
        dataset.filtered(|r| r.label() == Label::Real),
        dataset.filtered(|r| r.label() == Label::Fake),
    )
}
