//! The effective run configuration and its `# key=value` echo.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use wbcsvm::eval::{default_sets, EvalSettings, DEFAULT_FRACTIONS};
use wbcsvm::format::parse_config_block;
use wbcsvm::svm::{DEFAULT_C, DEFAULT_GAP_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL, FULL_GRAM_LIMIT};
use wbcsvm::{FeatureSet, KernelSpec, Orientation, PartitionSpec, RankingScope, Scaling, TrainParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Fscore,
    Train,
    Predict,
    Sweep,
    Ablate,
    Report,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommandKind::Fscore => "fscore",
            CommandKind::Train => "train",
            CommandKind::Predict => "predict",
            CommandKind::Sweep => "sweep",
            CommandKind::Ablate => "ablate",
            CommandKind::Report => "report",
        })
    }
}

impl FromStr for CommandKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fscore" => CommandKind::Fscore,
            "train" => CommandKind::Train,
            "predict" => CommandKind::Predict,
            "sweep" => CommandKind::Sweep,
            "ablate" => CommandKind::Ablate,
            "report" => CommandKind::Report,
            other => bail!("unknown command `{other}`"),
        })
    }
}

pub fn parse_scope(s: &str) -> Result<RankingScope> {
    match s {
        "full" => Ok(RankingScope::FullDataset),
        "train" => Ok(RankingScope::TrainSplit),
        other => bail!("ranking scope `{other}` is not `full` or `train`"),
    }
}

fn scope_name(scope: RankingScope) -> &'static str {
    match scope {
        RankingScope::FullDataset => "full",
        RankingScope::TrainSplit => "train",
    }
}

/// `0.5,0.6` style list.
pub fn parse_fractions(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .with_context(|| format!("`{f}` is not a number"))
        })
        .collect()
}

/// `1,2,3;1,3,6,7,9` style list of feature sets.
pub fn parse_sets(s: &str) -> Result<Vec<FeatureSet>> {
    s.split(';')
        .map(|set| {
            set.trim()
                .parse::<FeatureSet>()
                .map_err(|e| anyhow!("feature set `{set}`: {e}"))
        })
        .collect()
}

/// Every setting that influences a command's output. Absent optional
/// values echo as an empty string.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub data: PathBuf,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub chart: Option<PathBuf>,
    pub features: Option<FeatureSet>,
    pub c: f64,
    pub kernel: KernelSpec,
    pub tol: f64,
    pub gap_tol: f64,
    pub max_iter: u64,
    pub seed: u64,
    pub fraction: f64,
    pub fractions: Vec<f64>,
    pub sets: Vec<FeatureSet>,
    pub stop_at: Option<usize>,
    pub stratified: bool,
    pub positive_class: Orientation,
    pub scale: Scaling,
    pub ranking_scope: RankingScope,
}

impl RunConfig {
    pub fn new(command: CommandKind, data: PathBuf) -> RunConfig {
        RunConfig {
            command,
            data,
            model: None,
            out: None,
            chart: None,
            features: None,
            c: DEFAULT_C,
            kernel: KernelSpec::Linear,
            tol: DEFAULT_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            fraction: 0.5,
            fractions: DEFAULT_FRACTIONS.to_vec(),
            sets: default_sets(),
            stop_at: None,
            stratified: true,
            positive_class: Orientation::default(),
            scale: Scaling::None,
            ranking_scope: RankingScope::default(),
        }
    }

    /// One seed drives partitioning and solver tie-breaking alike.
    pub fn train_params(&self) -> TrainParams {
        TrainParams {
            c: self.c,
            kernel: self.kernel,
            tol: self.tol,
            gap_tol: self.gap_tol,
            max_iter: self.max_iter,
            seed: self.seed,
            scaling: self.scale,
            full_gram_limit: FULL_GRAM_LIMIT,
        }
    }

    pub fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            params: self.train_params(),
            stratified: self.stratified,
            orientation: self.positive_class,
        }
    }

    pub fn split(&self) -> PartitionSpec {
        PartitionSpec::new(self.fraction, self.seed, self.stratified)
    }

    pub fn echo(&self) -> Vec<(&'static str, String)> {
        fn path(p: &Option<PathBuf>) -> String {
            p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
        }
        let join = |v: &[String], sep: &str| v.join(sep);
        vec![
            ("command", self.command.to_string()),
            ("data", self.data.display().to_string()),
            ("model", path(&self.model)),
            ("out", path(&self.out)),
            ("chart", path(&self.chart)),
            ("features", self.features.as_ref().map(ToString::to_string).unwrap_or_default()),
            ("c", self.c.to_string()),
            ("kernel", self.kernel.to_string()),
            ("tol", self.tol.to_string()),
            ("gap_tol", self.gap_tol.to_string()),
            ("max_iter", self.max_iter.to_string()),
            ("seed", self.seed.to_string()),
            ("fraction", self.fraction.to_string()),
            (
                "fractions",
                join(&self.fractions.iter().map(ToString::to_string).collect::<Vec<_>>(), ","),
            ),
            (
                "sets",
                join(&self.sets.iter().map(ToString::to_string).collect::<Vec<_>>(), ";"),
            ),
            ("stop_at", self.stop_at.map(|s| s.to_string()).unwrap_or_default()),
            ("stratified", self.stratified.to_string()),
            ("positive_class", self.positive_class.to_string()),
            ("scale", self.scale.to_string()),
            ("ranking_scope", scope_name(self.ranking_scope).to_string()),
        ]
    }

    /// Rebuild a config from the echo block at the top of an artifact.
    pub fn from_echo(text: &str) -> Result<RunConfig> {
        let (pairs, _) = parse_config_block(text);
        if pairs.is_empty() {
            bail!("no `# key=value` configuration block found");
        }
        let get = |key: &str| -> Result<&str> {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| anyhow!("configuration block lacks `{key}`"))
        };
        let opt_path = |key: &str| -> Result<Option<PathBuf>> {
            Ok(Some(get(key)?).filter(|v| !v.is_empty()).map(PathBuf::from))
        };
        let num = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .with_context(|| format!("`{key}` is not a number"))
        };
        let int = |key: &str| -> Result<u64> {
            get(key)?
                .parse()
                .with_context(|| format!("`{key}` is not an integer"))
        };
        let features = match get("features")? {
            "" => None,
            s => Some(s.parse().map_err(|e| anyhow!("features: {e}"))?),
        };
        let stop_at = match get("stop_at")? {
            "" => None,
            s => Some(s.parse().context("`stop_at` is not an integer")?),
        };
        Ok(RunConfig {
            command: get("command")?.parse()?,
            data: PathBuf::from(get("data")?),
            model: opt_path("model")?,
            out: opt_path("out")?,
            chart: opt_path("chart")?,
            features,
            c: num("c")?,
            kernel: get("kernel")?.parse().map_err(|e| anyhow!("kernel: {e}"))?,
            tol: num("tol")?,
            gap_tol: num("gap_tol")?,
            max_iter: int("max_iter")?,
            seed: int("seed")?,
            fraction: num("fraction")?,
            fractions: parse_fractions(get("fractions")?)?,
            sets: parse_sets(get("sets")?)?,
            stop_at,
            stratified: get("stratified")?
                .parse()
                .context("`stratified` is not true/false")?,
            positive_class: get("positive_class")?
                .parse()
                .map_err(|e| anyhow!("positive_class: {e}"))?,
            scale: get("scale")?.parse().map_err(|e| anyhow!("scale: {e}"))?,
            ranking_scope: parse_scope(get("ranking_scope")?)?,
        })
    }
}
