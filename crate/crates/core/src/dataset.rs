//! Wisconsin breast cancer records: parsing, cleaning, splitting and
//! feature projection.
//!
//! The on-disk layout is the UCI `breast-cancer-wisconsin.data` file: one
//! record per line, 11 comma-separated fields, no header. Field 1 is the
//! sample code number, fields 2-10 are the nine cytology scores (1-10, or
//! `?` when missing) and field 11 is the class code (2 benign, 4 malignant).

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const BENIGN_CODE: u8 = 2;
pub const MALIGNANT_CODE: u8 = 4;
pub const MISSING_MARKER: &str = "?";
pub const WBC_FIELDS: usize = 11;
pub const WBC_FEATURES: usize = 9;
pub const VALUE_MIN: i64 = 1;
pub const VALUE_MAX: i64 = 10;

pub const WBC_FEATURE_NAMES: [&str; WBC_FEATURES] = [
    "clump_thickness",
    "uniformity_of_cell_size",
    "uniformity_of_cell_shape",
    "marginal_adhesion",
    "single_epithelial_cell_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
];

/// Binary class label. `Positive` is +1, `Negative` is -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    pub fn from_sign(value: i64) -> Option<Label> {
        match value {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Positive => f.write_str("1"),
            Label::Negative => f.write_str("-1"),
        }
    }
}

/// Which raw class code becomes the positive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Code 4 (malignant) is +1, code 2 (benign) is -1.
    #[default]
    MalignantPositive,
    BenignPositive,
}

impl Orientation {
    pub fn label_for_code(self, code: u8) -> Option<Label> {
        let malignant = match code {
            MALIGNANT_CODE => true,
            BENIGN_CODE => false,
            _ => return None,
        };
        let positive = malignant == (self == Orientation::MalignantPositive);
        Some(if positive { Label::Positive } else { Label::Negative })
    }

    pub fn code_for_label(self, label: Label) -> u8 {
        let malignant = (label == Label::Positive) == (self == Orientation::MalignantPositive);
        if malignant {
            MALIGNANT_CODE
        } else {
            BENIGN_CODE
        }
    }

    pub fn positive_class_name(self) -> &'static str {
        match self {
            Orientation::MalignantPositive => "malignant",
            Orientation::BenignPositive => "benign",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.positive_class_name())
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "malignant" => Ok(Orientation::MalignantPositive),
            "benign" => Ok(Orientation::BenignPositive),
            other => Err(format!("unknown positive class `{other}` (expected malignant or benign)")),
        }
    }
}

/// Optional feature rescaling. Off by default: every WBC attribute already
/// shares the 1-10 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    #[default]
    None,
    /// Maps the attribute domain [1, 10] linearly onto [0, 1].
    Unit,
}

impl Scaling {
    pub fn apply(self, features: &mut [f64]) {
        if let Scaling::Unit = self {
            let span = (VALUE_MAX - VALUE_MIN) as f64;
            for v in features {
                *v = (*v - VALUE_MIN as f64) / span;
            }
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scaling::None => f.write_str("none"),
            Scaling::Unit => f.write_str("unit"),
        }
    }
}

impl FromStr for Scaling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Scaling::None),
            "unit" => Ok(Scaling::Unit),
            other => Err(format!("unknown scaling `{other}` (expected none or unit)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub features: Vec<f64>,
    pub label: Label,
}

/// An immutable labeled table. Instance identity is position, not id: the
/// UCI file repeats some sample code numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    instances: Vec<Instance>,
    feature_names: Vec<String>,
    origin: FeatureSet,
    positive_count: usize,
    negative_count: usize,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, instances: Vec<Instance>) -> Result<Dataset> {
        let dim = feature_names.len();
        if let Some((pos, bad)) = instances
            .iter()
            .enumerate()
            .find(|(_, inst)| inst.features.len() != dim)
        {
            return Err(Error::InvalidDataset(format!(
                "instance {pos} (id {}) has {} features, expected {dim}",
                bad.id,
                bad.features.len()
            )));
        }
        let positive_count = instances
            .iter()
            .filter(|i| i.label == Label::Positive)
            .count();
        let negative_count = instances.len() - positive_count;
        Ok(Dataset {
            instances,
            origin: FeatureSet::all(dim),
            feature_names,
            positive_count,
            negative_count,
        })
    }

    /// Dataset with the standard WBC attribute names.
    pub fn with_wbc_names(instances: Vec<Instance>) -> Result<Dataset> {
        Dataset::new(
            WBC_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            instances,
        )
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// 1-based indices, in the schema this dataset was loaded with, of the
    /// columns it currently holds. The identity set unless projected.
    pub fn origin(&self) -> &FeatureSet {
        &self.origin
    }

    fn rebuild(&self, instances: Vec<Instance>) -> Dataset {
        let mut ds = Dataset::new(self.feature_names.clone(), instances).expect("same shape");
        ds.origin = self.origin.clone();
        ds
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    /// Instances at `positions`, in the order given.
    pub fn subset(&self, positions: &[usize]) -> Dataset {
        self.rebuild(positions.iter().map(|&p| self.instances[p].clone()).collect())
    }

    pub fn with_labels_flipped(&self) -> Dataset {
        let instances = self
            .instances
            .iter()
            .map(|i| Instance {
                label: i.label.flipped(),
                ..i.clone()
            })
            .collect();
        self.rebuild(instances)
    }

    pub fn scaled(&self, scaling: Scaling) -> Dataset {
        if scaling == Scaling::None {
            return self.clone();
        }
        let instances = self
            .instances
            .iter()
            .map(|i| {
                let mut features = i.features.clone();
                scaling.apply(&mut features);
                Instance {
                    features,
                    ..i.clone()
                }
            })
            .collect();
        self.rebuild(instances)
    }

    /// Keep only the features in `keep` (1-based), in the given order.
    pub fn project(&self, keep: &FeatureSet) -> Result<Dataset> {
        keep.validate(self.dim())?;
        let cols: Vec<usize> = keep.zero_based().collect();
        let feature_names = cols.iter().map(|&c| self.feature_names[c].clone()).collect();
        let instances = self
            .instances
            .iter()
            .map(|i| Instance {
                id: i.id.clone(),
                features: cols.iter().map(|&c| i.features[c]).collect(),
                label: i.label,
            })
            .collect();
        let mut ds = Dataset::new(feature_names, instances)?;
        ds.origin = FeatureSet(cols.iter().map(|&c| self.origin.0[c]).collect());
        Ok(ds)
    }
}

/// Non-empty ordered set of distinct 1-based feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureSet(Vec<usize>);

impl FeatureSet {
    pub fn new(indices: Vec<usize>) -> Result<FeatureSet> {
        if indices.is_empty() {
            return Err(Error::InvalidSubset("feature set is empty".into()));
        }
        let mut seen = HashSet::new();
        for &i in &indices {
            if i == 0 {
                return Err(Error::InvalidSubset("feature indices are 1-based".into()));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidSubset(format!("feature {i} listed twice")));
            }
        }
        Ok(FeatureSet(indices))
    }

    pub fn all(dim: usize) -> FeatureSet {
        FeatureSet((1..=dim).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|i| i - 1)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i > dim) {
            Some(i) => Err(Error::InvalidSubset(format!(
                "feature {i} out of range 1..={dim}"
            ))),
            None => Ok(()),
        }
    }

    pub fn is_identity(&self, dim: usize) -> bool {
        self.0.len() == dim && self.0.iter().enumerate().all(|(k, &i)| i == k + 1)
    }

    /// Same indices in ascending order.
    pub fn sorted(&self) -> FeatureSet {
        let mut v = self.0.clone();
        v.sort_unstable();
        FeatureSet(v)
    }

    /// Sets are equal as sets (order ignored).
    pub fn same_members(&self, other: &FeatureSet) -> bool {
        self.sorted() == other.sorted()
    }

    pub fn without(&self, index: usize) -> Result<FeatureSet> {
        FeatureSet::new(self.0.iter().copied().filter(|&i| i != index).collect())
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureSet> {
        let indices = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSubset(format!("`{}` is not a feature index", tok.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureSet::new(indices)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub orientation: Orientation,
}

/// Result of parsing a WBC stream before the non-empty check.
#[derive(Debug, Clone)]
pub struct ParsedRecords {
    pub instances: Vec<Instance>,
    /// 1-based line numbers of records dropped for missing values.
    pub dropped_lines: Vec<usize>,
}

/// Parse records, dropping any containing the missing marker. Blank lines
/// and `#` comment lines are skipped. Does not require the result to be
/// non-empty.
pub fn read_wbc_records<R: BufRead>(source: R, options: LoadOptions) -> Result<ParsedRecords> {
    let mut instances = Vec::new();
    let mut dropped_lines = Vec::new();
    for (k, line) in source.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_record(line, lineno, options.orientation)? {
            Some(inst) => instances.push(inst),
            None => dropped_lines.push(lineno),
        }
    }
    Ok(ParsedRecords {
        instances,
        dropped_lines,
    })
}

fn parse_record(line: &str, lineno: usize, orientation: Orientation) -> Result<Option<Instance>> {
    let parse_err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != WBC_FIELDS {
        return Err(parse_err(format!(
            "expected {WBC_FIELDS} fields, found {}",
            fields.len()
        )));
    }
    let id = fields[0];
    if id.is_empty() {
        return Err(parse_err("empty sample id".into()));
    }
    let mut missing = false;
    let mut features = Vec::with_capacity(WBC_FEATURES);
    for raw in &fields[1..=WBC_FEATURES] {
        if *raw == MISSING_MARKER {
            missing = true;
            continue;
        }
        let v: i64 = raw
            .parse()
            .map_err(|_| parse_err(format!("`{raw}` is not an integer")))?;
        if !(VALUE_MIN..=VALUE_MAX).contains(&v) {
            return Err(parse_err(format!(
                "value {v} outside {VALUE_MIN}..={VALUE_MAX}"
            )));
        }
        features.push(v as f64);
    }
    let class_raw = fields[WBC_FIELDS - 1];
    let label = class_raw
        .parse::<u8>()
        .ok()
        .and_then(|code| orientation.label_for_code(code))
        .ok_or_else(|| parse_err(format!("class `{class_raw}` is not 2 or 4")))?;
    if missing {
        return Ok(None);
    }
    Ok(Some(Instance {
        id: id.to_string(),
        features,
        label,
    }))
}

/// Load and clean a WBC stream.
pub fn load_wbc<R: BufRead>(source: R, options: LoadOptions) -> Result<Dataset> {
    let parsed = read_wbc_records(source, options)?;
    if !parsed.dropped_lines.is_empty() {
        log::info!(
            "dropped {} instances with missing attribute values",
            parsed.dropped_lines.len()
        );
    }
    if parsed.instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::with_wbc_names(parsed.instances)
}

/// Write `ds` in the UCI layout. Only meaningful for unprojected data.
pub fn write_wbc<W: Write>(ds: &Dataset, orientation: Orientation, mut out: W) -> Result<()> {
    for inst in ds.instances() {
        write!(out, "{}", inst.id)?;
        for v in &inst.features {
            write!(out, ",{v}")?;
        }
        writeln!(out, ",{}", orientation.code_for_label(inst.label))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for PartitionSpec {
    fn default() -> Self {
        PartitionSpec {
            train_fraction: 0.5,
            seed: 0,
            stratified: true,
        }
    }
}

impl PartitionSpec {
    pub fn new(train_fraction: f64, seed: u64, stratified: bool) -> PartitionSpec {
        PartitionSpec {
            train_fraction,
            seed,
            stratified,
        }
    }
}

/// Positions selected for each side, both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_indices(ds: &Dataset, spec: &PartitionSpec) -> Result<SplitIndices> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::InvalidPartition(format!(
            "train fraction {f} not in (0, 1)"
        )));
    }
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let groups: Vec<Vec<usize>> = if spec.stratified {
        [Label::Negative, Label::Positive]
            .iter()
            .map(|&l| {
                (0..ds.len())
                    .filter(|&p| ds.instances()[p].label == l)
                    .collect()
            })
            .collect()
    } else {
        vec![(0..ds.len()).collect()]
    };
    for mut group in groups {
        let take = (f * group.len() as f64).round() as usize;
        group.shuffle(&mut rng);
        train.extend_from_slice(&group[..take.min(group.len())]);
    }
    train.sort_unstable();
    let mut in_train = vec![false; ds.len()];
    for &p in &train {
        in_train[p] = true;
    }
    let test: Vec<usize> = (0..ds.len()).filter(|&p| !in_train[p]).collect();
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidPartition(format!(
            "fraction {f} of {} instances leaves one side empty",
            ds.len()
        )));
    }
    Ok(SplitIndices { train, test })
}

/// Split into (train, test). Each side keeps the input order.
pub fn partition(ds: &Dataset, spec: &PartitionSpec) -> Result<(Dataset, Dataset)> {
    let split = split_indices(ds, spec)?;
    Ok((ds.subset(&split.train), ds.subset(&split.test)))
}

pub fn project_features(ds: &Dataset, keep: &FeatureSet) -> Result<Dataset> {
    ds.project(keep)
}

/// Tab-separated `side position id` lines, train side first.
pub fn write_manifest<W: Write>(ds: &Dataset, split: &SplitIndices, mut out: W) -> Result<()> {
    writeln!(out, "side\tposition\tid")?;
    for (side, positions) in [("train", &split.train), ("test", &split.test)] {
        for &p in positions {
            writeln!(out, "{side}\t{p}\t{}", ds.instances()[p].id)?;
        }
    }
    Ok(())
}
