//! Experiment harness: partition-size sweeps, feature-subset ablations,
//! backward elimination runs and seed-stability studies.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;

use crate::dataset::{partition, Dataset, FeatureSet, Label, Orientation, PartitionSpec};
use crate::error::{Error, Result};
use crate::format::{parse_config_block, write_config_block};
use crate::fscore::{backward_eliminate, RankingScope};
use crate::svm::{self, TrainParams};

/// Train fractions of the standard partition sweep, in report order.
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.4];

/// The four reference feature subsets ("Set 1" .. "Set 4").
pub const DEFAULT_SETS: [&[usize]; 4] = [
    &[1, 2, 3, 4, 5, 6, 7, 9],
    &[1, 2, 3, 4, 6, 7, 9],
    &[1, 2, 3, 6, 7, 9],
    &[1, 3, 6, 7, 9],
];

pub const SWEEP_HEADER: &str =
    "label\ttrain_accuracy\ttest_accuracy\ttrain_size\ttest_size\tseed\ttp\tfp\ttn\tfn";
pub const CHART_HEADER: &str = "label,train_accuracy,test_accuracy";

pub fn default_sets() -> Vec<FeatureSet> {
    DEFAULT_SETS
        .iter()
        .map(|s| FeatureSet::new(s.to_vec()).expect("valid default set"))
        .collect()
}

/// Test-side confusion counts, with the positive label as "positive".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Positive) => self.fp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Positive, Label::Negative) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        100.0 * (self.tp + self.tn) as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRecord {
    pub label: String,
    /// Percent.
    pub train_accuracy: f64,
    /// Percent.
    pub test_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
    pub confusion: Confusion,
}

/// Everything besides the dataset that determines a sweep's numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    pub params: TrainParams,
    pub stratified: bool,
    pub orientation: Orientation,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            params: TrainParams::default(),
            stratified: true,
            orientation: Orientation::default(),
        }
    }
}

impl EvalSettings {
    pub fn describe(&self) -> Vec<(String, String)> {
        let p = &self.params;
        vec![
            ("c".into(), p.c.to_string()),
            ("kernel".into(), p.kernel.to_string()),
            ("tol".into(), p.tol.to_string()),
            ("gap_tol".into(), p.gap_tol.to_string()),
            ("max_iter".into(), p.max_iter.to_string()),
            ("scale".into(), p.scaling.to_string()),
            ("stratified".into(), self.stratified.to_string()),
            ("positive_class".into(), self.orientation.to_string()),
        ]
    }

    fn split(&self, fraction: f64, seed: u64) -> PartitionSpec {
        PartitionSpec::new(fraction, seed, self.stratified)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub records: Vec<AccuracyRecord>,
    /// Effective run parameters, echoed into every emitted artifact.
    pub config: Vec<(String, String)>,
}

impl SweepReport {
    pub fn record(&self, label: &str) -> Option<&AccuracyRecord> {
        self.records.iter().find(|r| r.label == label)
    }

    /// Label of the record with the highest test accuracy (first on ties).
    pub fn best_test(&self) -> Option<&AccuracyRecord> {
        self.records
            .iter()
            .reduce(|best, r| if r.test_accuracy > best.test_accuracy { r } else { best })
    }

    /// Config block followed by a tab-separated table, accuracies to one
    /// decimal place.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        write_config_block(&mut out, &self.config)?;
        writeln!(out, "{SWEEP_HEADER}")?;
        for r in &self.records {
            let c = r.confusion;
            writeln!(
                out,
                "{}\t{:.1}\t{:.1}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.label,
                r.train_accuracy,
                r.test_accuracy,
                r.train_size,
                r.test_size,
                r.seed,
                c.tp,
                c.fp,
                c.tn,
                c.fn_
            )?;
        }
        Ok(())
    }
}

/// `0.5` -> `"50-50"`, `0.4` -> `"40-60"`.
pub fn fraction_label(fraction: f64) -> String {
    let train = (fraction * 100.0).round() as i64;
    format!("{train}-{}", 100 - train)
}

/// "Set N" for the reference subsets, the index list otherwise.
pub fn set_label(set: &FeatureSet) -> String {
    default_sets()
        .iter()
        .position(|d| d.same_members(set))
        .map(|k| format!("Set {}", k + 1))
        .unwrap_or_else(|| set.to_string())
}

/// Train on the training side of `spec` and score both sides.
pub fn evaluate_split(
    ds: &Dataset,
    spec: &PartitionSpec,
    params: &TrainParams,
    label: impl Into<String>,
) -> Result<AccuracyRecord> {
    let (train, test) = partition(ds, spec)?;
    evaluate_sides(&train, &test, params, label.into(), spec.seed)
}

fn evaluate_sides(
    train: &Dataset,
    test: &Dataset,
    params: &TrainParams,
    label: String,
    seed: u64,
) -> Result<AccuracyRecord> {
    let model = svm::train(train, params)?;
    let train_accuracy = svm::accuracy(&model, train)?;
    let mut confusion = Confusion::default();
    for inst in test.instances() {
        confusion.record(inst.label, model.classify(&inst.features)?.label);
    }
    Ok(AccuracyRecord {
        label,
        train_accuracy,
        test_accuracy: confusion.accuracy(),
        train_size: train.len(),
        test_size: test.len(),
        seed,
        confusion,
    })
}

fn ensure_unique(records: &[AccuracyRecord]) -> Result<()> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.label.as_str()) {
            return Err(Error::InvalidPartition(format!(
                "duplicate experiment label `{}`",
                r.label
            )));
        }
    }
    Ok(())
}

/// One record per train fraction, in the order given.
pub fn partition_sweep(
    ds: &Dataset,
    fractions: &[f64],
    seed: u64,
    settings: &EvalSettings,
) -> Result<SweepReport> {
    if fractions.is_empty() {
        return Err(Error::InvalidPartition("no train fractions given".into()));
    }
    let records = fractions
        .par_iter()
        .map(|&f| evaluate_split(ds, &settings.split(f, seed), &settings.params, fraction_label(f)))
        .collect::<Result<Vec<_>>>()?;
    ensure_unique(&records)?;
    let mut config = settings.describe();
    config.push(("seed".into(), seed.to_string()));
    config.push((
        "fractions".into(),
        fractions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(","),
    ));
    Ok(SweepReport { records, config })
}

/// One record per feature subset, all on the same split.
pub fn ablation_sweep(
    ds: &Dataset,
    sets: &[FeatureSet],
    spec: &PartitionSpec,
    settings: &EvalSettings,
) -> Result<SweepReport> {
    if sets.is_empty() {
        return Err(Error::InvalidSubset("no feature sets given".into()));
    }
    let records = sets
        .par_iter()
        .map(|set| {
            let projected = ds.project(set)?;
            evaluate_split(&projected, spec, &settings.params, set_label(set))
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_unique(&records)?;
    let mut config = settings.describe();
    config.push(("seed".into(), spec.seed.to_string()));
    config.push(("train_fraction".into(), spec.train_fraction.to_string()));
    config.push((
        "sets".into(),
        sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"),
    ));
    Ok(SweepReport { records, config })
}

/// Backward elimination from all features down to `stop_at`, one record
/// per stage.
pub fn elimination_sweep(
    ds: &Dataset,
    spec: &PartitionSpec,
    stop_at: usize,
    scope: RankingScope,
    settings: &EvalSettings,
) -> Result<SweepReport> {
    let mut records = Vec::new();
    backward_eliminate(ds, spec, stop_at, scope, |train, test| {
        let label = set_label(train.origin());
        let r = evaluate_sides(train, test, &settings.params, label, spec.seed)?;
        let accs = (r.train_accuracy, r.test_accuracy);
        records.push(r);
        Ok(accs)
    })?;
    let mut config = settings.describe();
    config.push(("seed".into(), spec.seed.to_string()));
    config.push(("train_fraction".into(), spec.train_fraction.to_string()));
    config.push(("stop_at".into(), stop_at.to_string()));
    config.push((
        "ranking_scope".into(),
        match scope {
            RankingScope::FullDataset => "full",
            RankingScope::TrainSplit => "train",
        }
        .into(),
    ));
    Ok(SweepReport { records, config })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedStudy {
    pub label: String,
    pub records: Vec<AccuracyRecord>,
    pub mean_test: f64,
    /// Sample standard deviation (n - 1).
    pub std_test: f64,
    pub mean_train: f64,
    pub std_train: f64,
}

/// Repeat one split over several seeds. Each seed drives both the shuffle
/// and the solver's tie-breaking.
pub fn seed_study(
    ds: &Dataset,
    fraction: f64,
    seeds: &[u64],
    settings: &EvalSettings,
) -> Result<SeedStudy> {
    if seeds.is_empty() {
        return Err(Error::InvalidPartition("no seeds given".into()));
    }
    let records = seeds
        .par_iter()
        .map(|&seed| {
            let params = settings.params.clone().with_seed(seed);
            evaluate_split(ds, &settings.split(fraction, seed), &params, fraction_label(fraction))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean_test, std_test) = mean_std(records.iter().map(|r| r.test_accuracy));
    let (mean_train, std_train) = mean_std(records.iter().map(|r| r.train_accuracy));
    Ok(SeedStudy {
        label: fraction_label(fraction),
        records,
        mean_test,
        std_test,
        mean_train,
        std_train,
    })
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Grouped-bar data: `label,train_accuracy,test_accuracy`, values at full
/// precision.
pub fn emit_chart_data<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    if report.records.is_empty() {
        log::warn!("chart data has no records; writing header only");
    }
    writeln!(out, "{CHART_HEADER}")?;
    for r in &report.records {
        writeln!(out, "{},{},{}", r.label, r.train_accuracy, r.test_accuracy)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartRow {
    pub label: String,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Inverse of [`emit_chart_data`]; a leading `# key=value` block is skipped.
pub fn parse_chart_data(text: &str) -> Result<Vec<ChartRow>> {
    let (config, body) = parse_config_block(text);
    let skipped = config.len();
    let mut lines = body.lines().enumerate().map(|(k, l)| (k + skipped, l));
    match lines.next() {
        Some((_, h)) if h == CHART_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: skipped + 1,
                message: format!("expected header `{CHART_HEADER}`"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, line)| {
            let err = |m: &str| Error::Parse {
                line: k + 1,
                message: m.to_string(),
            };
            // Labels may contain commas ("1,3,6,7,9"), so split from the right.
            let mut parts = line.rsplitn(3, ',');
            let test = parts.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad test accuracy"))?;
            let train = parts.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad train accuracy"))?;
            let label = parts.next().ok_or_else(|| err("missing label"))?;
            Ok(ChartRow {
                label: label.to_string(),
                train_accuracy: train,
                test_accuracy: test,
            })
        })
        .collect()
}
