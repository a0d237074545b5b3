use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::bail;
use clap::Args;
use discourse_core::ingest::{split, SplitManifest};
use discourse_core::traits::{
    attach_traits, default_grid, evaluate_rule, posterior_curve, RuleKind, RuleMetrics, RuleSpec, SyntheticScorer,
    DEFAULT_THRESHOLD,
};
use discourse_core::{Dataset, Trait, TraitError};
use serde::Serialize;

use crate::args::{Common, SplitChoice, TraitSource, SPLIT_FILE};
use crate::output::OutDir;

pub const CURVES_FILE: &str = "curves.csv";
pub const METRICS_FILE: &str = "rule_metrics.json";

#[derive(Args, Clone, Debug)]
pub struct TraitsArgs {
    #[command(flatten)]
    pub common: Common,
    /// columns, synthetic:SEED or synthetic:SEED:SHIFT
    #[arg(long, default_value = "columns")]
    pub trait_source: TraitSource,
    /// A trait is low when strictly below this value
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Comma-separated subset of global>1, global>2, global>3, low_ei,
    /// low_sn, low_tf, any_low (default: all)
    #[arg(long, value_delimiter = ',')]
    pub rules: Vec<RuleKind>,
    /// Which half of the split to evaluate on
    #[arg(long, value_enum, default_value_t = SplitChoice::Eval)]
    pub split: SplitChoice,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraitsReport {
    pub trait_source: String,
    pub split: String,
    pub records: usize,
    pub label_counts: BTreeMap<String, usize>,
    pub threshold: f64,
    pub rules: Vec<RuleMetrics>,
}

/// Writes `curves.csv` (every trait on the 101-point grid) and
/// `rule_metrics.json`.
pub fn run(args: &TraitsArgs) -> anyhow::Result<TraitsReport> {
    let c = &args.common;
    let rules = match args.rules.as_slice() {
        [] => RuleSpec::standard_suite(args.threshold)?,
        kinds => kinds.iter().map(|&k| RuleSpec::new(k, args.threshold)).collect::<Result<_, _>>()?,
    };
    let out = OutDir::claim(&c.out, c.force, &[CURVES_FILE, METRICS_FILE])?;
    let dataset = with_traits(c.load()?, args.trait_source)?;
    let subset = select(&dataset, args)?;

    let mut csv = String::from("trait,a,cdf_label0,cdf_label1,p_label0,p_label1,defined\n");
    for t in Trait::ALL {
        for p in posterior_curve(&subset, t, &default_grid())? {
            let (p0, p1, defined) = match p.posterior {
                Some((p0, p1)) => (p0.to_string(), p1.to_string(), 1),
                None => (String::new(), String::new(), 0),
            };
            writeln!(csv, "{},{:.2},{},{},{p0},{p1},{defined}", t.name(), p.a, p.cdf_label0, p.cdf_label1)?;
        }
    }
    let metrics = rules.iter().map(|r| evaluate_rule(r, &subset)).collect::<Result<Vec<_>, _>>()?;
    let (real, fake) = subset.label_counts();
    let report = TraitsReport {
        trait_source: args.trait_source.to_string(),
        split: format!("{:?}", args.split).to_lowercase(),
        records: subset.len(),
        label_counts: BTreeMap::from([("0".to_owned(), real), ("1".to_owned(), fake)]),
        threshold: args.threshold,
        rules: metrics,
    };
    out.text(CURVES_FILE, &csv)?;
    out.json(METRICS_FILE, &report)?;
    Ok(report)
}

fn with_traits(dataset: Dataset, source: TraitSource) -> anyhow::Result<Dataset> {
    match source {
        TraitSource::Synthetic { seed, shift } => Ok(attach_traits(&dataset, &SyntheticScorer::shifted(seed, shift))),
        TraitSource::Columns => {
            if let Some(r) = dataset.records().iter().find(|r| r.traits.is_none()) {
                return Err(TraitError::MissingTraits(r.id()).into());
            }
            Ok(dataset)
        }
    }
}

/// The prepared split manifest is reused when reading the prepared dataset;
/// an explicit `--input` is split afresh from `--seed`/`--test-fraction`.
fn select(dataset: &Dataset, args: &TraitsArgs) -> anyhow::Result<Dataset> {
    if args.split == SplitChoice::All {
        return Ok(dataset.clone());
    }
    let c = &args.common;
    let manifest_path = c.out.join(SPLIT_FILE);
    let parts = if c.input.is_none() && manifest_path.exists() {
        let manifest: SplitManifest = serde_json::from_slice(&std::fs::read(&manifest_path)?)?;
        manifest.apply(dataset)?
    } else {
        split(dataset, c.split_spec())?
    };
    let chosen = if args.split == SplitChoice::Test { parts.test } else { parts.eval };
    if chosen.is_empty() {
        bail!("the selected split is empty");
    }
    Ok(chosen)
}
