use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LacanError;
use crate::model::{HeadlineId, Label, LacanCode};

/// One expert assignment joined with the headline's ground truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub headline_id: HeadlineId,
    pub code: LacanCode,
    pub label: Label,
}

impl Annotation {
    pub fn new(headline_id: HeadlineId, code: LacanCode, label: Label) -> Self {
        Annotation {
            headline_id,
            code,
            label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityEntry {
    pub code: LacanCode,
    pub real_ids: Vec<HeadlineId>,
    pub fake_ids: Vec<HeadlineId>,
}

/// Codes assigned to headlines of both labels, ordered by code index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityReport {
    pub entries: Vec<AmbiguityEntry>,
}

impl AmbiguityReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = LacanCode> + '_ {
        self.entries.iter().map(|e| e.code)
    }
}

fn check_unique(annotations: &[Annotation]) -> Result<(), LacanError> {
    let mut seen = HashSet::with_capacity(annotations.len());
    for a in annotations {
        if !seen.insert(a.headline_id) {
            return Err(LacanError::DuplicateAnnotation(a.headline_id));
        }
    }
    Ok(())
}

/// Finds every code used for both Real and Fake headlines. Id lists keep input order.
pub fn detect_ambiguities(annotations: &[Annotation]) -> Result<AmbiguityReport, LacanError> {
    check_unique(annotations)?;
    let mut by_code: BTreeMap<LacanCode, (Vec<HeadlineId>, Vec<HeadlineId>)> = BTreeMap::new();
    for a in annotations {
        let (real, fake) = by_code.entry(a.code).or_default();
        match a.label {
            Label::Real => real.push(a.headline_id),
            Label::Fake => fake.push(a.headline_id),
        }
    }
    let entries = by_code
        .into_iter()
        .filter(|(_, (real, fake))| !real.is_empty() && !fake.is_empty())
        .map(|(code, (real_ids, fake_ids))| AmbiguityEntry {
            code,
            real_ids,
            fake_ids,
        })
        .collect();
    Ok(AmbiguityReport { entries })
}

/// Ambiguity-free mapping from observed codes to labels. Codes without an
/// entry are don't-cares.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionTable {
    defined: BTreeMap<LacanCode, Label>,
}

impl PartitionTable {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (LacanCode, Label)>) -> Result<Self, LacanError> {
        let mut defined = BTreeMap::new();
        for (code, label) in pairs {
            if let Some(prev) = defined.insert(code, label) {
                if prev != label {
                    return Err(LacanError::MalformedTable(format!("code {code} mapped to both labels")));
                }
            }
        }
        Ok(PartitionTable { defined })
    }

    pub fn get(&self, code: LacanCode) -> Option<Label> {
        self.defined.get(&code).copied()
    }

    pub fn defined(&self) -> impl Iterator<Item = (LacanCode, Label)> + '_ {
        self.defined.iter().map(|(&c, &l)| (c, l))
    }

    pub fn codes_for(&self, label: Label) -> BTreeSet<LacanCode> {
        self.defined().filter(|&(_, l)| l == label).map(|(c, _)| c).collect()
    }

    pub fn dont_cares(&self) -> BTreeSet<LacanCode> {
        LacanCode::all().filter(|c| !self.defined.contains_key(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.defined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defined.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    defined: BTreeMap<String, Label>,
    dont_care: Vec<String>,
}

impl Serialize for PartitionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PartitionJson {
            defined: self.defined().map(|(c, l)| (c.to_string(), l)).collect(),
            dont_care: self.dont_cares().iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartitionTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PartitionJson::deserialize(deserializer)?;
        let mut defined = BTreeMap::new();
        for (code, label) in raw.defined {
            defined.insert(code.parse::<LacanCode>().map_err(D::Error::custom)?, label);
        }
        let table = PartitionTable { defined };
        let dont_care = raw
            .dont_care
            .iter()
            .map(|c| c.parse::<LacanCode>())
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(D::Error::custom)?;
        if dont_care != table.dont_cares() {
            return Err(D::Error::custom("dont_care must list exactly the undefined codes"));
        }
        Ok(table)
    }
}

/// Builds the code partition, or fails with the ambiguity report.
pub fn build_partition(annotations: &[Annotation]) -> Result<PartitionTable, LacanError> {
    let report = detect_ambiguities(annotations)?;
    if !report.is_empty() {
        return Err(LacanError::AmbiguousPartition(report));
    }
    PartitionTable::from_pairs(annotations.iter().map(|a| (a.code, a.label)))
}
