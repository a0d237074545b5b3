use std::collections::BTreeMap;

use anyhow::Context;
use clap::Args;
use discourse_core::ingest::{dedupe, filter_short, split, write_dataset, SplitManifest, DEFAULT_MIN_WORDS};
use discourse_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::args::{load_raw, Common, DATASET_FILE, SPLIT_FILE};
use crate::output::OutDir;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Args, Clone, Debug)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Headlines with fewer words are dropped
    #[arg(long, default_value_t = DEFAULT_MIN_WORDS)]
    pub min_words: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub input_rows: usize,
    pub removed_short: usize,
    pub removed_dup: usize,
    /// Duplicates whose label disagreed with the kept copy.
    pub label_conflicts: usize,
    pub total: usize,
    /// Keyed by label code, "0" = Real, "1" = Fake.
    pub label_counts: BTreeMap<String, usize>,
    pub test_size: usize,
    pub eval_size: usize,
    pub test_label_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub test_fraction: f64,
}

fn counts(d: &Dataset) -> BTreeMap<String, usize> {
    let (real, fake) = d.label_counts();
    BTreeMap::from([("0".to_owned(), real), ("1".to_owned(), fake)])
}

/// Filters short headlines, drops duplicate texts, splits, and writes
/// `dataset.csv`, `split.json` and `summary.json`.
pub fn run(args: &PrepareArgs) -> anyhow::Result<Summary> {
    let c = &args.common;
    let input = c.input.as_deref().context("prepare needs --input")?;
    let out = OutDir::claim(&c.out, c.force, &[DATASET_FILE, SPLIT_FILE, SUMMARY_FILE])?;
    let raw = load_raw(input, &c.schema())?;
    let long_enough = filter_short(&raw, args.min_words);
    let deduped = dedupe(&long_enough);
    let dataset = deduped.dataset;
    let spec = c.split_spec();
    let parts = split(&dataset, spec)?;

    let summary = Summary {
        input_rows: raw.len(),
        removed_short: raw.len() - long_enough.len(),
        removed_dup: deduped.removed,
        label_conflicts: deduped.label_conflicts,
        total: dataset.len(),
        label_counts: counts(&dataset),
        test_size: parts.test.len(),
        eval_size: parts.eval.len(),
        test_label_counts: counts(&parts.test),
        seed: spec.seed,
        test_fraction: spec.test_fraction.to_f64(),
    };
    write_dataset(&dataset, &out.path(DATASET_FILE))?;
    out.json(SPLIT_FILE, &SplitManifest::new(spec, &parts))?;
    out.json(SUMMARY_FILE, &summary)?;
    Ok(summary)
}
