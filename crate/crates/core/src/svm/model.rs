use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::kernel::KernelSpec;
use crate::dataset::{Dataset, FeatureSet, Label, Scaling};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "wbcsvm-model";
pub const MODEL_VERSION: u32 = 1;

/// |Σ αₖyₖ| allowed on load, relative to max(1, Σ αₖ).
const EQUALITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    /// Row of the training set this vector came from.
    pub position: usize,
    pub id: String,
    pub alpha: f64,
    pub label: Label,
    /// Feature values after the model's scaling.
    pub features: Vec<f64>,
}

impl SupportVector {
    /// Signed multiplier αy.
    pub fn weight(&self) -> f64 {
        self.alpha * self.label.sign()
    }
}

/// Output of the decision rule. `D = 0` goes to the negative class with
/// `boundary_tie` set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: Label,
    pub discriminant: f64,
    pub boundary_tie: bool,
}

impl Decision {
    pub fn from_discriminant(discriminant: f64) -> Decision {
        Decision {
            label: if discriminant > 0.0 {
                Label::Positive
            } else {
                Label::Negative
            },
            discriminant,
            boundary_tie: discriminant == 0.0,
        }
    }
}

/// A trained soft-margin classifier. Multipliers of non-support vectors are
/// zero and not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    kernel: KernelSpec,
    c: f64,
    bias: f64,
    feature_subset: FeatureSet,
    scaling: Scaling,
    train_size: usize,
    support_vectors: Vec<SupportVector>,
}

impl SvmModel {
    /// Assemble a model, checking the box and equality constraints.
    pub fn from_parts(
        kernel: KernelSpec,
        c: f64,
        bias: f64,
        feature_subset: FeatureSet,
        scaling: Scaling,
        train_size: usize,
        support_vectors: Vec<SupportVector>,
    ) -> Result<SvmModel> {
        let invariant = |m: String| Err(Error::ModelInvariant(m));
        if !(c > 0.0 && c.is_finite()) {
            return invariant(format!("c = {c} must be positive and finite"));
        }
        if !bias.is_finite() {
            return invariant(format!("bias = {bias} is not finite"));
        }
        let mut positions = HashSet::new();
        let mut balance = 0.0;
        let mut total = 0.0;
        for sv in &support_vectors {
            if !(sv.alpha > 0.0 && sv.alpha <= c) {
                return invariant(format!(
                    "support vector {} has alpha {} outside (0, {c}]",
                    sv.position, sv.alpha
                ));
            }
            if sv.features.len() != feature_subset.len() {
                return invariant(format!(
                    "support vector {} has {} features, subset has {}",
                    sv.position,
                    sv.features.len(),
                    feature_subset.len()
                ));
            }
            if sv.position >= train_size || !positions.insert(sv.position) {
                return invariant(format!(
                    "support vector position {} is out of range or repeated",
                    sv.position
                ));
            }
            balance += sv.weight();
            total += sv.alpha;
        }
        if balance.abs() > EQUALITY_TOLERANCE * total.max(1.0) {
            return invariant(format!("sum of alpha*y is {balance:e}, expected 0"));
        }
        Ok(SvmModel {
            kernel,
            c,
            bias,
            feature_subset,
            scaling,
            train_size,
            support_vectors,
        })
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn feature_subset(&self) -> &FeatureSet {
        &self.feature_subset
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }

    pub fn support_vectors(&self) -> &[SupportVector] {
        &self.support_vectors
    }

    pub fn dim(&self) -> usize {
        self.feature_subset.len()
    }

    /// One multiplier per training row, zero for non-support vectors.
    pub fn alphas(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.train_size];
        for sv in &self.support_vectors {
            a[sv.position] = sv.alpha;
        }
        a
    }

    /// Σ αₖ - ½ Σₖ Σₗ αₖαₗyₖyₗK(xₖ, xₗ).
    pub fn dual_objective(&self) -> f64 {
        let svs = &self.support_vectors;
        let mut quad = 0.0;
        for a in svs {
            for b in svs {
                quad += a.weight() * b.weight() * self.kernel.eval(&a.features, &b.features);
            }
        }
        svs.iter().map(|s| s.alpha).sum::<f64>() - 0.5 * quad
    }

    /// Decision value Σ αₖyₖK(xₖ, x) + b for raw (unscaled) features.
    pub fn discriminant(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut scaled = x.to_vec();
        self.scaling.apply(&mut scaled);
        Ok(self
            .support_vectors
            .iter()
            .map(|sv| sv.weight() * self.kernel.eval(&sv.features, &scaled))
            .sum::<f64>()
            + self.bias)
    }

    pub fn classify(&self, x: &[f64]) -> Result<Decision> {
        self.discriminant(x).map(Decision::from_discriminant)
    }

    /// Bring `ds` onto the model's feature subset. Datasets whose columns are
    /// a superset of the subset are projected; anything else is an error.
    pub fn align(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.origin() == &self.feature_subset {
            return Ok(ds.clone());
        }
        let positions = self
            .feature_subset
            .indices()
            .iter()
            .map(|want| {
                ds.origin()
                    .indices()
                    .iter()
                    .position(|have| have == want)
                    .map(|p| p + 1)
                    .ok_or(Error::Shape {
                        expected: self.dim(),
                        got: ds.dim(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        log::info!(
            "projecting {}-feature data onto model subset {}",
            ds.dim(),
            self.feature_subset
        );
        ds.project(&FeatureSet::new(positions)?)
    }

    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}")?;
        writeln!(out, "kernel {}", self.kernel)?;
        writeln!(out, "c {}", fmt_f64(self.c))?;
        writeln!(out, "scale {}", self.scaling)?;
        writeln!(out, "feature_subset {}", self.feature_subset)?;
        writeln!(out, "bias {}", fmt_f64(self.bias))?;
        writeln!(out, "train_size {}", self.train_size)?;
        writeln!(out, "support_vectors {}", self.support_vectors.len())?;
        for sv in &self.support_vectors {
            let feats: Vec<String> = sv.features.iter().map(|&v| fmt_f64(v)).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                fmt_f64(sv.alpha),
                sv.label,
                feats.join(" "),
                sv.position,
                sv.id
            )?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(source: R) -> Result<SvmModel> {
        let mut lines = source.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((k, line)) => Ok((k + 1, line?)),
                None => Err(Error::ModelFormat {
                    line: 0,
                    message: format!("truncated: missing {what}"),
                }),
            }
        };

        let (ln, magic) = next("header")?;
        match magic.split_once(' ') {
            Some((MODEL_MAGIC, v)) if v == MODEL_VERSION.to_string() => {}
            Some((MODEL_MAGIC, v)) => {
                return Err(format_err(ln, format!("unsupported model version {v}")))
            }
            _ => return Err(format_err(ln, "not a wbcsvm model file".into())),
        }
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (ln, line) = next(key)?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok((ln, v.to_string())),
                _ => Err(format_err(ln, format!("expected `{key}` line"))),
            }
        };
        let (ln, v) = field("kernel")?;
        let kernel: KernelSpec = v.parse().map_err(|m| format_err(ln, m))?;
        let (ln, v) = field("c")?;
        let c = parse_f64(&v, ln)?;
        let (ln, v) = field("scale")?;
        let scaling: Scaling = v.parse().map_err(|m| format_err(ln, m))?;
        let (ln, v) = field("feature_subset")?;
        let feature_subset: FeatureSet = v.parse().map_err(|e: Error| format_err(ln, e.to_string()))?;
        let (ln, v) = field("bias")?;
        let bias = parse_f64(&v, ln)?;
        let (ln, v) = field("train_size")?;
        let train_size = parse_usize(&v, ln)?;
        let (ln, v) = field("support_vectors")?;
        let count = parse_usize(&v, ln)?;

        let mut support_vectors = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = next("support vector")?;
            let parts: Vec<&str> = line.splitn(5, '\t').collect();
            if parts.len() != 5 {
                return Err(format_err(ln, "expected 5 tab-separated fields".into()));
            }
            let alpha = parse_f64(parts[0], ln)?;
            let label = parts[1]
                .parse::<i64>()
                .ok()
                .and_then(Label::from_sign)
                .ok_or_else(|| format_err(ln, format!("label `{}` is not 1 or -1", parts[1])))?;
            let features = parts[2]
                .split(' ')
                .map(|t| parse_f64(t, ln))
                .collect::<Result<Vec<_>>>()?;
            let position = parse_usize(parts[3], ln)?;
            support_vectors.push(SupportVector {
                position,
                id: parts[4].to_string(),
                alpha,
                label,
                features,
            });
        }
        SvmModel::from_parts(
            kernel,
            c,
            bias,
            feature_subset,
            scaling,
            train_size,
            support_vectors,
        )
    }
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(line: usize, message: String) -> Error {
    Error::ModelFormat { line, message }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| format_err(line, format!("`{s}` is not a number")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| format_err(line, format!("`{s}` is not a count")))
}
