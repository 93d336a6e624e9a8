//! Command-line surface.

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use wbcsvm::svm::{DEFAULT_C, DEFAULT_GAP_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL};
use wbcsvm::{FeatureSet, Orientation, Scaling};

use crate::config::{parse_fractions, parse_scope, parse_sets, CommandKind, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "wbcsvm", version, about = "Linear SVM and F-score experiments on breast cytology data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank features by F-score.
    Fscore(Options),
    /// Train on one split; write the model and the per-example training report.
    Train(Options),
    /// Classify every row of --data with a saved model.
    Predict(Options),
    /// Accuracy over several train/test proportions.
    Sweep(Options),
    /// Accuracy over feature subsets, or backward elimination with --stop-at.
    Ablate(Options),
    /// Run the whole pipeline into the --out directory.
    Report(Options),
    /// Repeat the run recorded in an artifact's configuration block.
    Rerun {
        /// Any file written by this tool.
        artifact: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Options {
    /// Data file in the UCI comma-separated layout.
    #[arg(long)]
    pub data: PathBuf,
    /// Model file (written by train, read by predict).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output file (directory for report); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Chart data CSV for sweep and ablate.
    #[arg(long)]
    pub chart: Option<PathBuf>,
    /// Train on these 1-based features only, e.g. 1,3,6,7,9.
    #[arg(long, value_parser = parse_set)]
    pub features: Option<FeatureSet>,
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    /// KKT tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Relative primal-dual gap required at convergence.
    #[arg(long, default_value_t = DEFAULT_GAP_TOL)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train fraction of the split.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    /// Train fractions for sweep, comma-separated.
    #[arg(long)]
    pub fractions: Option<String>,
    /// Feature sets for ablate, `;`-separated, e.g. "1,2,3;1,3,6,7,9".
    #[arg(long)]
    pub sets: Option<String>,
    /// Run backward elimination down to this many features.
    #[arg(long)]
    pub stop_at: Option<usize>,
    /// Shuffle the whole dataset instead of each class separately.
    #[arg(long)]
    pub no_stratify: bool,
    #[arg(long, default_value = "malignant", value_parser = parse_orientation)]
    pub positive_class: Orientation,
    #[arg(long, default_value = "none", value_parser = parse_scaling)]
    pub scale: Scaling,
    /// Rank on the full dataset or on the training split only.
    #[arg(long, default_value = "full", value_parser = ["full", "train"])]
    pub ranking_scope: String,
}

fn parse_set(s: &str) -> Result<FeatureSet> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn parse_orientation(s: &str) -> Result<Orientation> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn parse_scaling(s: &str) -> Result<Scaling> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

impl Options {
    pub fn into_config(self, command: CommandKind) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(command, self.data);
        cfg.model = self.model;
        cfg.out = self.out;
        cfg.chart = self.chart;
        cfg.features = self.features;
        cfg.c = self.c;
        cfg.tol = self.tol;
        cfg.gap_tol = self.gap_tol;
        cfg.max_iter = self.max_iter;
        cfg.seed = self.seed;
        cfg.fraction = self.fraction;
        if let Some(f) = self.fractions {
            cfg.fractions = parse_fractions(&f)?;
        }
        if let Some(sets) = self.sets {
            cfg.sets = parse_sets(&sets)?;
        }
        cfg.stop_at = self.stop_at;
        cfg.stratified = !self.no_stratify;
        cfg.positive_class = self.positive_class;
        cfg.scale = self.scale;
        cfg.ranking_scope = parse_scope(&self.ranking_scope)?;
        Ok(cfg)
    }
}
