//! Domain types shared by every part of the toolkit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Ground-truth reliability tag of a headline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Real, Label::Fake];

    pub fn code(self) -> u8 {
        match self {
            Label::Real => 0,
            Label::Fake => 1,
        }
    }

    pub fn from_code(value: i64) -> Result<Self, ModelError> {
        match value {
            0 => Ok(Label::Real),
            1 => Ok(Label::Fake),
            other => Err(ModelError::BadLabel(other.to_string())),
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Real => Label::Fake,
            Label::Fake => Label::Real,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Real => "Real",
            Label::Fake => "Fake",
        })
    }
}

impl FromStr for Label {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(Label::Real),
            "1" => Ok(Label::Fake),
            other => Err(ModelError::BadLabel(other.to_string())),
        }
    }
}

// Labels travel as the integers 0 and 1 on every wire format.
impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.code())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = i64::deserialize(deserializer)?;
        Label::from_code(value).map_err(serde::de::Error::custom)
    }
}

/// Stable headline identifier: the data-row ordinal of the source file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeadlineId(pub u64);

impl fmt::Display for HeadlineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Headline {
    pub id: HeadlineId,
    text: String,
    pub label: Label,
}

impl Headline {
    /// Builds a headline, trimming the text. Blank text is rejected.
    pub fn new(id: HeadlineId, text: &str, label: Label) -> Result<Self, ModelError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ModelError::EmptyHeadline(id));
        }
        Ok(Headline {
            id,
            text: text.to_owned(),
            label,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

/// The four discourse flags, in the fixed M, A, U, H order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Discourse {
    Master,
    Analyst,
    University,
    Hysteric,
}

impl Discourse {
    pub const ALL: [Discourse; 4] = [
        Discourse::Master,
        Discourse::Analyst,
        Discourse::University,
        Discourse::Hysteric,
    ];

    /// Bit position inside a code index (M is the most significant bit).
    pub fn bit(self) -> u8 {
        match self {
            Discourse::Master => 3,
            Discourse::Analyst => 2,
            Discourse::University => 1,
            Discourse::Hysteric => 0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Discourse::Master => 'M',
            Discourse::Analyst => 'A',
            Discourse::University => 'U',
            Discourse::Hysteric => 'H',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'M' => Some(Discourse::Master),
            'A' => Some(Discourse::Analyst),
            'U' => Some(Discourse::University),
            'H' => Some(Discourse::Hysteric),
            _ => None,
        }
    }
}

/// Presence flags (M, A, U, H) of the four discourses in one enunciation.
///
/// Stored as its index `8m + 4a + 2u + h`; the textual form is the
/// 4-character bit string in M, A, U, H order, e.g. `"1010"`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LacanCode(u8);

impl LacanCode {
    pub const COUNT: usize = 16;

    pub fn new(m: bool, a: bool, u: bool, h: bool) -> Self {
        LacanCode((m as u8) << 3 | (a as u8) << 2 | (u as u8) << 1 | h as u8)
    }

    pub fn from_index(index: u8) -> Result<Self, ModelError> {
        if usize::from(index) < Self::COUNT {
            Ok(LacanCode(index))
        } else {
            Err(ModelError::CodeIndexOutOfRange(index))
        }
    }

    /// All 16 codes in index order.
    pub fn all() -> impl Iterator<Item = LacanCode> + Clone {
        (0..Self::COUNT as u8).map(LacanCode)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn has(self, discourse: Discourse) -> bool {
        self.0 >> discourse.bit() & 1 == 1
    }

    pub fn m(self) -> bool {
        self.has(Discourse::Master)
    }

    pub fn a(self) -> bool {
        self.has(Discourse::Analyst)
    }

    pub fn u(self) -> bool {
        self.has(Discourse::University)
    }

    pub fn h(self) -> bool {
        self.has(Discourse::Hysteric)
    }
}

impl fmt::Display for LacanCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in Discourse::ALL {
            f.write_str(if self.has(d) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for LacanCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LacanCode({self})")
    }
}

impl FromStr for LacanCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 4 {
            return Err(ModelError::MalformedCode(s.to_owned()));
        }
        let mut index = 0u8;
        for &b in bytes {
            index = index << 1
                | match b {
                    b'0' => 0,
                    b'1' => 1,
                    _ => return Err(ModelError::MalformedCode(s.to_owned())),
                };
        }
        Ok(LacanCode(index))
    }
}

impl Serialize for LacanCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LacanCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a 4-character `MAUH` bit string.
pub fn parse_code(text: &str) -> Result<LacanCode, ModelError> {
    text.parse()
}

pub fn format_code(code: LacanCode) -> String {
    code.to_string()
}

pub fn code_index(code: LacanCode) -> u8 {
    code.index()
}

/// One of the four Myers-Briggs dichotomies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Trait {
    #[serde(rename = "EI")]
    Ei,
    #[serde(rename = "SN")]
    Sn,
    #[serde(rename = "TF")]
    Tf,
    #[serde(rename = "JP")]
    Jp,
}

impl Trait {
    pub const ALL: [Trait; 4] = [Trait::Ei, Trait::Sn, Trait::Tf, Trait::Jp];

    pub fn name(self) -> &'static str {
        match self {
            Trait::Ei => "EI",
            Trait::Sn => "SN",
            Trait::Tf => "TF",
            Trait::Jp => "JP",
        }
    }
}

impl fmt::Display for Trait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Trait {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "EI" => Ok(Trait::Ei),
            "SN" => Ok(Trait::Sn),
            "TF" => Ok(Trait::Tf),
            "JP" => Ok(Trait::Jp),
            _ => Err(ModelError::UnknownTrait(s.to_owned())),
        }
    }
}

/// Personality-trait probabilities attached to a headline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraitVector {
    ei: f64,
    sn: f64,
    tf: f64,
    jp: f64,
}

impl TraitVector {
    pub fn new(ei: f64, sn: f64, tf: f64, jp: f64) -> Result<Self, ModelError> {
        for (t, v) in Trait::ALL.into_iter().zip([ei, sn, tf, jp]) {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::TraitOutOfRange(t, v));
            }
        }
        Ok(TraitVector { ei, sn, tf, jp })
    }

    pub fn get(&self, t: Trait) -> f64 {
        match t {
            Trait::Ei => self.ei,
            Trait::Sn => self.sn,
            Trait::Tf => self.tf,
            Trait::Jp => self.jp,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub headline: Headline,
    pub traits: Option<TraitVector>,
    pub code: Option<LacanCode>,
}

impl Record {
    pub fn new(headline: Headline) -> Self {
        Record {
            headline,
            traits: None,
            code: None,
        }
    }

    pub fn with_traits(mut self, traits: TraitVector) -> Self {
        self.traits = Some(traits);
        self
    }

    pub fn id(&self) -> HeadlineId {
        self.headline.id
    }

    pub fn label(&self) -> Label {
        self.headline.label
    }
}

/// Ordered collection of records with unique headline ids.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    records: Vec<Record>,
    by_id: HashMap<HeadlineId, usize>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records
    }
}

impl Dataset {
    pub fn new(records: Vec<Record>) -> Result<Self, ModelError> {
        let mut by_id = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if by_id.insert(r.id(), i).is_some() {
                return Err(ModelError::DuplicateId(r.id()));
            }
        }
        Ok(Dataset { records, by_id })
    }

    /// Keeps the records matching `keep`, in order. Uniqueness is inherited.
    pub fn filtered(&self, mut keep: impl FnMut(&Record) -> bool) -> Dataset {
        let records: Vec<Record> = self.records.iter().filter(|r| keep(r)).cloned().collect();
        let by_id = records.iter().enumerate().map(|(i, r)| (r.id(), i)).collect();
        Dataset { records, by_id }
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = HeadlineId> + '_ {
        self.records.iter().map(Record::id)
    }

    pub fn get(&self, id: HeadlineId) -> Option<&Record> {
        self.by_id.get(&id).map(|&i| &self.records[i])
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let fake = self.records.iter().filter(|r| r.label() == Label::Fake).count();
        (self.records.len() - fake, fake)
    }
}
