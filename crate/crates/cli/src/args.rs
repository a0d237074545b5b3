use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use discourse_core::ingest::{load_dataset, ColumnSchema, Fraction, SplitSpec};
use discourse_core::{Dataset, IngestError};

/// Name of the cleaned dataset inside the output directory.
pub const DATASET_FILE: &str = "dataset.csv";
pub const SPLIT_FILE: &str = "split.json";

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Input CSV (defaults to the prepared dataset in the output directory)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory, created if absent
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test-set fraction, decimal or p/q
    #[arg(long, default_value = "0.4")]
    pub test_fraction: Fraction,
    /// Overwrite existing output files
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub columns: Columns,
}

#[derive(Args, Clone, Debug)]
pub struct Columns {
    #[arg(long, default_value = "headline")]
    pub headline_column: String,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Column holding headline ids; without it a column named `id` is used if
    /// present, else the row ordinal
    #[arg(long)]
    pub id_column: Option<String>,
}

impl Common {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Common {
            input: None,
            out: out.into(),
            seed: 0,
            test_fraction: Fraction::default(),
            force: false,
            columns: Columns {
                headline_column: "headline".into(),
                label_column: "label".into(),
                id_column: None,
            },
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            test_fraction: self.test_fraction,
            seed: self.seed,
        }
    }

    pub fn schema(&self) -> ColumnSchema {
        ColumnSchema {
            id: self.columns.id_column.clone(),
            headline: self.columns.headline_column.clone(),
            label: self.columns.label_column.clone(),
            ..ColumnSchema::default()
        }
    }

    /// `--input` if given, else the prepared dataset.
    pub fn load(&self) -> anyhow::Result<Dataset> {
        match &self.input {
            Some(path) => load_raw(path, &self.schema()),
            None => load_prepared(&self.out),
        }
    }
}

pub fn load_prepared(out: &Path) -> anyhow::Result<Dataset> {
    let path = out.join(DATASET_FILE);
    if !path.exists() {
        bail!("dataset not prepared: {} is missing (run `discourse prepare` first)", path.display());
    }
    load_dataset(&path, &ColumnSchema::prepared()).with_context(|| format!("reading {}", path.display()))
}

/// Loads with the given schema; without an explicit id column an `id`
/// column is picked up when the file has one.
pub fn load_raw(path: &Path, schema: &ColumnSchema) -> anyhow::Result<Dataset> {
    let context = || format!("reading {}", path.display());
    if schema.id.is_some() {
        return load_dataset(path, schema).with_context(context);
    }
    let with_id = ColumnSchema {
        id: Some("id".into()),
        ..schema.clone()
    };
    match load_dataset(path, &with_id) {
        Err(IngestError::MissingColumn(c)) if c == "id" => load_dataset(path, schema).with_context(context),
        other => other.with_context(context),
    }
}

/// Where trait vectors come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraitSource {
    /// EI, SN, TF, JP columns of the input.
    Columns,
    Synthetic { seed: u64, shift: f64 },
}

impl FromStr for TraitSource {
    type Err = String;

    /// `columns`, `synthetic:SEED` or `synthetic:SEED:SHIFT`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "columns" {
            return Ok(TraitSource::Columns);
        }
        let bad = || format!("bad trait source {s:?}; expected columns, synthetic:SEED or synthetic:SEED:SHIFT");
        let rest = s.strip_prefix("synthetic:").ok_or_else(bad)?;
        let mut parts = rest.split(':');
        let seed = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let shift = match parts.next() {
            Some(p) => p.parse::<f64>().ok().filter(|v| (0.0..1.0).contains(v)).ok_or_else(bad)?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(TraitSource::Synthetic { seed, shift })
    }
}

impl fmt::Display for TraitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraitSource::Columns => f.write_str("columns"),
            TraitSource::Synthetic { seed, shift } if *shift == 0.0 => write!(f, "synthetic:{seed}"),
            TraitSource::Synthetic { seed, shift } => write!(f, "synthetic:{seed}:{shift}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SplitChoice {
    #[default]
    Eval,
    Test,
    All,
}
