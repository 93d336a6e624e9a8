//! Per-example training and test reports in the Gist tab-separated layout.

use std::io::Write;

use super::model::{Decision, SvmModel};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::format::format_g;

pub const TRAINING_HEADER: &str = "example\tclass\tweight\ttrain_classification\ttrain_discriminant";
pub const TEST_HEADER: &str = "example\tclassification\tdiscriminant";

const TRAINING_DIGITS: usize = 4;
const TEST_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleReport {
    pub id: String,
    /// Known class; training reports only.
    pub class: Option<Label>,
    /// αy for the example; training reports only. Zero (signed like the
    /// class) for non-support vectors.
    pub weight: Option<f64>,
    pub classification: Label,
    pub discriminant: f64,
    pub boundary_tie: bool,
}

impl ExampleReport {
    pub fn is_training_error(&self) -> bool {
        self.class.is_some_and(|c| c != self.classification)
    }
}

fn by_descending_discriminant(rows: &mut [ExampleReport]) {
    rows.sort_by(|a, b| b.discriminant.total_cmp(&a.discriminant));
}

/// One row per training example, most positive discriminant first.
pub fn report_training(model: &SvmModel, train: &Dataset) -> Result<Vec<ExampleReport>> {
    if train.len() != model.train_size() {
        return Err(Error::Consistency(format!(
            "model was trained on {} examples, dataset has {}",
            model.train_size(),
            train.len()
        )));
    }
    let aligned = model.align(train)?;
    for sv in model.support_vectors() {
        let inst = &aligned.instances()[sv.position];
        if inst.id != sv.id || inst.label != sv.label {
            return Err(Error::Consistency(format!(
                "training row {} is `{}` ({}), model expects `{}` ({})",
                sv.position, inst.id, inst.label, sv.id, sv.label
            )));
        }
    }
    let alphas = model.alphas();
    let mut rows = aligned
        .instances()
        .iter()
        .zip(&alphas)
        .map(|(inst, &alpha)| {
            let d = model.classify(&inst.features)?;
            Ok(row(inst.id.clone(), Some(inst.label), Some(alpha * inst.label.sign()), d))
        })
        .collect::<Result<Vec<_>>>()?;
    by_descending_discriminant(&mut rows);
    Ok(rows)
}

/// One row per example of `ds`, most positive discriminant first.
pub fn report_test(model: &SvmModel, ds: &Dataset) -> Result<Vec<ExampleReport>> {
    let aligned = model.align(ds)?;
    let mut rows = aligned
        .instances()
        .iter()
        .map(|inst| Ok(row(inst.id.clone(), None, None, model.classify(&inst.features)?)))
        .collect::<Result<Vec<_>>>()?;
    by_descending_discriminant(&mut rows);
    Ok(rows)
}

fn row(id: String, class: Option<Label>, weight: Option<f64>, d: Decision) -> ExampleReport {
    ExampleReport {
        id,
        class,
        weight,
        classification: d.label,
        discriminant: d.discriminant,
        boundary_tie: d.boundary_tie,
    }
}

pub fn training_errors(rows: &[ExampleReport]) -> usize {
    rows.iter().filter(|r| r.is_training_error()).count()
}

pub fn write_training_report<W: Write>(rows: &[ExampleReport], mut out: W) -> Result<()> {
    writeln!(out, "{TRAINING_HEADER}")?;
    for r in rows {
        let (class, weight) = match (r.class, r.weight) {
            (Some(c), Some(w)) => (c, w),
            _ => {
                return Err(Error::Consistency(format!(
                    "row `{}` lacks class/weight for a training report",
                    r.id
                )))
            }
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.id,
            class,
            format_g(weight, TRAINING_DIGITS),
            r.classification,
            format_g(r.discriminant, TRAINING_DIGITS)
        )?;
    }
    Ok(())
}

pub fn write_test_report<W: Write>(rows: &[ExampleReport], mut out: W) -> Result<()> {
    writeln!(out, "{TEST_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}",
            r.id,
            r.classification,
            format_g(r.discriminant, TEST_DIGITS)
        )?;
    }
    Ok(())
}
