//! Soft-margin SVM training and prediction.

mod cache;
mod kernel;
mod model;
mod report;
mod smo;

pub use cache::FULL_GRAM_LIMIT;
pub use kernel::KernelSpec;
pub use model::{Decision, SupportVector, SvmModel, MODEL_MAGIC, MODEL_VERSION};
pub use report::{
    report_test, report_training, training_errors, write_test_report, write_training_report,
    ExampleReport, TEST_HEADER, TRAINING_HEADER,
};

use crate::dataset::{Dataset, Scaling};
use crate::error::{Error, Result};
use cache::GramCache;
use smo::SmoProblem;

pub const DEFAULT_C: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_GAP_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    /// Box constraint on every multiplier.
    pub c: f64,
    pub kernel: KernelSpec,
    /// KKT tolerance used as the stopping criterion.
    pub tol: f64,
    /// Relative primal-dual gap required on top of the KKT test.
    /// `f64::INFINITY` disables it.
    pub gap_tol: f64,
    /// Cap on pair updates.
    pub max_iter: u64,
    /// Seeds working-set tie-breaking.
    pub seed: u64,
    /// Applied to training data and to every input at prediction time.
    pub scaling: Scaling,
    pub full_gram_limit: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            c: DEFAULT_C,
            kernel: KernelSpec::Linear,
            tol: DEFAULT_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            scaling: Scaling::None,
            full_gram_limit: FULL_GRAM_LIMIT,
        }
    }
}

impl TrainParams {
    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: u64,
    /// Maximal KKT violation of the final iterate.
    pub gap: f64,
    pub dual_objective: f64,
}

pub fn train(ds: &Dataset, params: &TrainParams) -> Result<SvmModel> {
    train_detailed(ds, params).map(|(m, _)| m)
}

pub fn train_detailed(ds: &Dataset, params: &TrainParams) -> Result<(SvmModel, SolveStats)> {
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {} must be positive", params.c)));
    }
    if !(params.tol > 0.0 && params.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tol = {} must be positive",
            params.tol
        )));
    }
    if params.gap_tol.is_nan() || params.gap_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gap_tol = {} must be positive",
            params.gap_tol
        )));
    }
    if ds.positive_count() == 0 || ds.negative_count() == 0 {
        return Err(Error::DegenerateTraining(format!(
            "{} positive and {} negative examples; both classes are required",
            ds.positive_count(),
            ds.negative_count()
        )));
    }
    let scaled = ds.scaled(params.scaling);
    let points: Vec<&[f64]> = scaled
        .instances()
        .iter()
        .map(|i| i.features.as_slice())
        .collect();
    let problem = SmoProblem {
        gram: GramCache::new(params.kernel, points, params.full_gram_limit),
        y: scaled.instances().iter().map(|i| i.label.sign()).collect(),
        c: params.c,
        tol: params.tol,
        gap_tol: params.gap_tol,
        max_iter: params.max_iter,
        seed: params.seed,
    };
    let solution = problem.solve()?;
    let support_vectors = scaled
        .instances()
        .iter()
        .zip(&solution.alpha)
        .enumerate()
        .filter(|(_, (_, &a))| a > 0.0)
        .map(|(position, (inst, &alpha))| SupportVector {
            position,
            id: inst.id.clone(),
            alpha,
            label: inst.label,
            features: inst.features.clone(),
        })
        .collect();
    let model = SvmModel::from_parts(
        params.kernel,
        params.c,
        solution.bias,
        ds.origin().clone(),
        params.scaling,
        ds.len(),
        support_vectors,
    )?;
    let stats = SolveStats {
        iterations: solution.iterations,
        gap: solution.gap,
        dual_objective: solution.dual_objective,
    };
    Ok((model, stats))
}

/// Percentage of `ds` the model classifies correctly.
pub fn accuracy(model: &SvmModel, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Ok(0.0);
    }
    let aligned = model.align(ds)?;
    let mut correct = 0usize;
    for inst in aligned.instances() {
        if model.classify(&inst.features)?.label == inst.label {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / ds.len() as f64)
}
