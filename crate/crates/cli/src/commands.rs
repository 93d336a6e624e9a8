//! Command implementations. Every artifact is rendered in memory, prefixed
//! with the config echo, and only then written out.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use wbcsvm::dataset::{
    load_wbc, partition, read_wbc_records, split_indices, write_manifest, write_wbc, LoadOptions,
};
use wbcsvm::eval::{ablation_sweep, elimination_sweep, emit_chart_data, partition_sweep, SweepReport};
use wbcsvm::format::{parse_config_block, write_config_block};
use wbcsvm::fscore::rank_features;
use wbcsvm::svm::{
    self, report_test, report_training, training_errors, write_test_report, write_training_report,
};
use wbcsvm::{Dataset, RankingScope, SvmModel};

use crate::config::{CommandKind, RunConfig};

/// Write a finished artifact to `path`, or to stdout when none was given.
fn deliver(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display()))?;
            log::info!("wrote {}", p.display());
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Render an artifact behind the config echo, then deliver it.
fn emit(cfg: &RunConfig, path: Option<&Path>, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write_config_block(&mut buf, &cfg.echo())?;
    body(&mut buf)?;
    deliver(path, &buf)
}

/// Sweep table (which carries its own config block) plus optional chart.
fn emit_sweep(cfg: &RunConfig, mut report: SweepReport, out: Option<&Path>, chart: Option<&Path>) -> Result<()> {
    report.config = cfg
        .echo()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let mut buf = Vec::new();
    report.write_tsv(&mut buf)?;
    deliver(out, &buf)?;
    if let Some(chart) = chart {
        emit(cfg, Some(chart), |buf| Ok(emit_chart_data(&report, buf)?))?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn load_data(cfg: &RunConfig) -> Result<Dataset> {
    let options = LoadOptions {
        orientation: cfg.positive_class,
    };
    load_wbc(open(&cfg.data)?, options)
        .with_context(|| format!("cannot load {}", cfg.data.display()))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Refuse to overwrite any input file.
fn check_outputs(cfg: &RunConfig) -> Result<()> {
    let mut inputs = vec![&cfg.data];
    if cfg.command == CommandKind::Predict {
        inputs.extend(cfg.model.as_ref());
    }
    let outputs = [cfg.out.as_ref(), cfg.chart.as_ref()]
        .into_iter()
        .chain((cfg.command == CommandKind::Train).then_some(cfg.model.as_ref()))
        .flatten();
    for out in outputs {
        if let Some(input) = inputs.iter().find(|i| same_file(i, out)) {
            bail!("output {} would overwrite input {}", out.display(), input.display());
        }
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    check_outputs(cfg)?;
    log::debug!("effective configuration: {:?}", cfg.echo());
    match cfg.command {
        CommandKind::Fscore => fscore(cfg),
        CommandKind::Train => train(cfg),
        CommandKind::Predict => predict(cfg),
        CommandKind::Sweep => sweep(cfg),
        CommandKind::Ablate => ablate(cfg),
        CommandKind::Report => report(cfg),
    }
}

/// Re-run the command recorded in an artifact's config block.
pub fn rerun(artifact: &Path) -> Result<()> {
    let text = fs::read_to_string(artifact)
        .with_context(|| format!("cannot open {}", artifact.display()))?;
    let cfg = RunConfig::from_echo(&text)
        .with_context(|| format!("cannot read configuration from {}", artifact.display()))?;
    log::info!("re-running `{}` from {}", cfg.command, artifact.display());
    run(&cfg)
}

fn ranked_dataset(cfg: &RunConfig, ds: &Dataset) -> Result<Dataset> {
    Ok(match cfg.ranking_scope {
        RankingScope::FullDataset => ds.clone(),
        RankingScope::TrainSplit => partition(ds, &cfg.split())?.0,
    })
}

fn fscore(cfg: &RunConfig) -> Result<()> {
    let ds = load_data(cfg)?;
    let ranking = rank_features(&ranked_dataset(cfg, &ds)?)?;
    emit(cfg, cfg.out.as_deref(), |buf| {
        Ok(ranking.write_tsv(ds.feature_names(), buf)?)
    })
}

fn selected(cfg: &RunConfig, ds: Dataset) -> Result<Dataset> {
    match &cfg.features {
        Some(set) => Ok(ds.project(set)?),
        None => Ok(ds),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str, cfg: &RunConfig) -> Result<&'a Path> {
    path.as_deref()
        .with_context(|| format!("`{}` needs {flag} PATH", cfg.command))
}

fn train(cfg: &RunConfig) -> Result<()> {
    let model_path = required(&cfg.model, "--model", cfg)?;
    let ds = selected(cfg, load_data(cfg)?)?;
    let (train, test) = partition(&ds, &cfg.split())?;
    let model = svm::train(&train, &cfg.train_params())?;
    let rows = report_training(&model, &train)?;
    log::info!(
        "{} support vectors, {} training errors of {}, test accuracy {:.2}%",
        model.support_vectors().len(),
        training_errors(&rows),
        train.len(),
        svm::accuracy(&model, &test)?
    );
    emit(cfg, Some(model_path), |buf| Ok(model.save(buf)?))?;
    emit(cfg, cfg.out.as_deref(), |buf| Ok(write_training_report(&rows, buf)?))
}

fn load_model(path: &Path) -> Result<SvmModel> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot open {}", path.display()))?;
    let (_, body) = parse_config_block(&text);
    SvmModel::load(body.as_bytes()).with_context(|| format!("cannot load model {}", path.display()))
}

fn predict(cfg: &RunConfig) -> Result<()> {
    let model = load_model(required(&cfg.model, "--model", cfg)?)?;
    let options = LoadOptions {
        orientation: cfg.positive_class,
    };
    let parsed = read_wbc_records(open(&cfg.data)?, options)
        .with_context(|| format!("cannot load {}", cfg.data.display()))?;
    if !parsed.dropped_lines.is_empty() {
        log::info!(
            "dropped {} instances with missing attribute values",
            parsed.dropped_lines.len()
        );
    }
    if parsed.instances.is_empty() {
        log::warn!("{} has no usable rows; writing header only", cfg.data.display());
    }
    let ds = Dataset::with_wbc_names(parsed.instances)?;
    let rows = if ds.is_empty() {
        Vec::new()
    } else {
        report_test(&model, &ds)?
    };
    emit(cfg, cfg.out.as_deref(), |buf| Ok(write_test_report(&rows, buf)?))
}

fn sweep(cfg: &RunConfig) -> Result<()> {
    let ds = selected(cfg, load_data(cfg)?)?;
    let report = partition_sweep(&ds, &cfg.fractions, cfg.seed, &cfg.eval_settings())?;
    emit_sweep(cfg, report, cfg.out.as_deref(), cfg.chart.as_deref())
}

fn ablate(cfg: &RunConfig) -> Result<()> {
    let ds = load_data(cfg)?;
    let settings = cfg.eval_settings();
    let report = match cfg.stop_at {
        Some(stop_at) => elimination_sweep(&ds, &cfg.split(), stop_at, cfg.ranking_scope, &settings)?,
        None => ablation_sweep(&ds, &cfg.sets, &cfg.split(), &settings)?,
    };
    emit_sweep(cfg, report, cfg.out.as_deref(), cfg.chart.as_deref())
}

/// Names of the files `report` writes into its output directory.
pub const REPORT_FILES: [&str; 10] = [
    "cleaned.data",
    "split.tsv",
    "fscore.tsv",
    "model.txt",
    "train_report.tsv",
    "test_report.tsv",
    "sweep.tsv",
    "sweep_chart.csv",
    "ablation.tsv",
    "ablation_chart.csv",
];

/// Full pipeline into one directory.
fn report(cfg: &RunConfig) -> Result<()> {
    let dir = required(&cfg.out, "--out", cfg)?;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let file = |name: &str| dir.join(name);
    let ds = load_data(cfg)?;
    emit(cfg, Some(&file("cleaned.data")), |buf| {
        Ok(write_wbc(&ds, cfg.positive_class, buf)?)
    })?;
    let ranking = rank_features(&ranked_dataset(cfg, &ds)?)?;
    emit(cfg, Some(&file("fscore.tsv")), |buf| {
        Ok(ranking.write_tsv(ds.feature_names(), buf)?)
    })?;

    let chosen = selected(cfg, ds.clone())?;
    let split = split_indices(&chosen, &cfg.split())?;
    emit(cfg, Some(&file("split.tsv")), |buf| Ok(write_manifest(&chosen, &split, buf)?))?;
    let (train, test) = (chosen.subset(&split.train), chosen.subset(&split.test));
    let model = svm::train(&train, &cfg.train_params())?;
    emit(cfg, Some(&file("model.txt")), |buf| Ok(model.save(buf)?))?;
    let rows = report_training(&model, &train)?;
    emit(cfg, Some(&file("train_report.tsv")), |buf| {
        Ok(write_training_report(&rows, buf)?)
    })?;
    let rows = report_test(&model, &test)?;
    emit(cfg, Some(&file("test_report.tsv")), |buf| Ok(write_test_report(&rows, buf)?))?;

    let settings = cfg.eval_settings();
    let sweeps = [
        ("sweep", partition_sweep(&chosen, &cfg.fractions, cfg.seed, &settings)?),
        (
            "ablation",
            match cfg.stop_at {
                Some(s) => elimination_sweep(&ds, &cfg.split(), s, cfg.ranking_scope, &settings)?,
                None => ablation_sweep(&ds, &cfg.sets, &cfg.split(), &settings)?,
            },
        ),
    ];
    for (name, report) in sweeps {
        let table = file(&format!("{name}.tsv"));
        let chart = file(&format!("{name}_chart.csv"));
        emit_sweep(cfg, report, Some(&table), Some(&chart))?;
    }
    log::info!("report written to {}", dir.display());
    Ok(())
}
