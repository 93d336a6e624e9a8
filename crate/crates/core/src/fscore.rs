//! Univariate F-score ranking and greedy backward elimination.
//!
//! For feature `i` the score is the between-class separation of the class
//! means around the grand mean, divided by the sum of the two within-class
//! sample variances:
//!
//! ```text
//!        (mean⁺ - mean)² + (mean⁻ - mean)²
//! F = ------------------------------------------
//!      Σ(x⁺ - mean⁺)²/(n⁺-1) + Σ(x⁻ - mean⁻)²/(n⁻-1)
//! ```
//!
//! A zero denominator yields 0 when the numerator is also 0 and
//! `f64::INFINITY` otherwise. Ties in the ranking go to the lower index.

use std::cmp::Ordering;
use std::io::Write;

use crate::dataset::{partition, Dataset, FeatureSet, Instance, Label, PartitionSpec};
use crate::error::{Error, Result};

/// Which rows the ranking is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankingScope {
    /// One global ranking over the whole cleaned dataset.
    #[default]
    FullDataset,
    /// Rank on the training side of the split only.
    TrainSplit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScore {
    /// 1-based.
    pub index: usize,
    pub fscore: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FScoreRanking {
    /// One entry per feature, in index order.
    pub scores: Vec<FeatureScore>,
    /// Feature indices, best first.
    pub order: Vec<usize>,
}

impl FScoreRanking {
    pub fn score(&self, index: usize) -> Option<f64> {
        self.scores.get(index.checked_sub(1)?).map(|s| s.fscore)
    }

    /// 1-based rank of a feature.
    pub fn rank_of(&self, index: usize) -> Option<usize> {
        self.order.iter().position(|&i| i == index).map(|p| p + 1)
    }

    /// The `k` lowest-ranked features, lowest last.
    pub fn bottom(&self, k: usize) -> &[usize] {
        &self.order[self.order.len().saturating_sub(k)..]
    }

    /// The `k` highest-ranked features as a set, in ascending index order.
    pub fn top(&self, k: usize) -> Result<FeatureSet> {
        FeatureSet::new(self.order[..k.min(self.order.len())].to_vec()).map(|s| s.sorted())
    }

    /// Tab-separated `feature_index feature_name fscore rank`, best first.
    pub fn write_tsv<W: Write>(&self, feature_names: &[String], mut out: W) -> Result<()> {
        writeln!(out, "feature_index\tfeature_name\tfscore\trank")?;
        for (rank, &index) in self.order.iter().enumerate() {
            let name = feature_names.get(index - 1).map(String::as_str).unwrap_or("");
            writeln!(
                out,
                "{index}\t{name}\t{}\t{}",
                self.scores[index - 1].fscore,
                rank + 1
            )?;
        }
        Ok(())
    }
}

/// One class's values for a single feature. Sums run over the sorted
/// values, so the score depends only on the multiset (identically
/// distributed features tie exactly), and on integer data the class means
/// are correctly rounded quotients of exact sums, so a mathematically zero
/// numerator stays zero.
struct ClassColumn {
    values: Vec<f64>,
    mean: f64,
}

impl ClassColumn {
    fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        ClassColumn { values, mean }
    }

    fn n(&self) -> usize {
        self.values.len()
    }

    fn sample_variance(&self) -> f64 {
        let m = self.mean;
        self.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (self.n() - 1) as f64
    }
}

/// F-score of feature `index` (1-based).
pub fn fscore_one(ds: &Dataset, index: usize) -> Result<f64> {
    if index == 0 || index > ds.dim() {
        return Err(Error::InvalidSubset(format!(
            "feature {index} out of range 1..={}",
            ds.dim()
        )));
    }
    let col = index - 1;
    let (pos, neg): (Vec<&Instance>, Vec<&Instance>) = ds
        .instances()
        .iter()
        .partition(|inst| inst.label == Label::Positive);
    for (class, count) in [("positive", pos.len()), ("negative", neg.len())] {
        if count < 2 {
            return Err(Error::InsufficientClassSize {
                feature: index,
                class,
                count,
            });
        }
    }
    let pos = ClassColumn::new(pos.iter().map(|i| i.features[col]).collect());
    let neg = ClassColumn::new(neg.iter().map(|i| i.features[col]).collect());
    // mean⁺ - mean = (n⁻/n)(mean⁺ - mean⁻) and mean⁻ - mean = -(n⁺/n)(mean⁺ - mean⁻).
    let (np, nn) = (pos.n() as f64, neg.n() as f64);
    let n = np + nn;
    let diff = pos.mean - neg.mean;
    let numerator = (np * np + nn * nn) / (n * n) * diff * diff;
    let denominator = pos.sample_variance() + neg.sample_variance();
    Ok(if denominator > 0.0 {
        numerator / denominator
    } else if numerator > 0.0 {
        f64::INFINITY
    } else {
        0.0
    })
}

/// Descending by score, ascending index on ties.
pub fn order_by_score(scores: &[FeatureScore]) -> Vec<usize> {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| match b.fscore.total_cmp(&a.fscore) {
        Ordering::Equal => a.index.cmp(&b.index),
        o => o,
    });
    sorted.into_iter().map(|s| s.index).collect()
}

pub fn rank_features(ds: &Dataset) -> Result<FScoreRanking> {
    let scores = (1..=ds.dim())
        .map(|index| fscore_one(ds, index).map(|fscore| FeatureScore { index, fscore }))
        .collect::<Result<Vec<_>>>()?;
    let order = order_by_score(&scores);
    Ok(FScoreRanking { scores, order })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStage {
    /// Kept features, ascending.
    pub kept: FeatureSet,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Start from every feature and repeatedly drop the lowest-ranked one,
/// calling `trainer(train, test)` on each stage until `stop_at` remain.
/// The first stage is the full feature set.
pub fn backward_eliminate<F>(
    ds: &Dataset,
    spec: &PartitionSpec,
    stop_at: usize,
    scope: RankingScope,
    mut trainer: F,
) -> Result<Vec<EliminationStage>>
where
    F: FnMut(&Dataset, &Dataset) -> Result<(f64, f64)>,
{
    let dim = ds.dim();
    if stop_at == 0 || stop_at > dim {
        return Err(Error::InvalidSubset(format!(
            "stop_at {stop_at} not in 1..={dim}"
        )));
    }
    let ranking = match scope {
        RankingScope::FullDataset => rank_features(ds)?,
        RankingScope::TrainSplit => rank_features(&partition(ds, spec)?.0)?,
    };
    let mut kept = FeatureSet::all(dim);
    let mut stages = Vec::with_capacity(dim - stop_at + 1);
    loop {
        let projected = ds.project(&kept)?;
        let (train, test) = partition(&projected, spec)?;
        let (train_accuracy, test_accuracy) = trainer(&train, &test)?;
        stages.push(EliminationStage {
            kept: kept.clone(),
            train_accuracy,
            test_accuracy,
        });
        if kept.len() == stop_at {
            break;
        }
        let weakest = ranking.order[kept.len() - 1];
        kept = kept.without(weakest)?;
        log::debug!("dropping feature {weakest}, {} remain", kept.len());
    }
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds_from_columns(cols: &[&[f64]], labels: &[i64]) -> Dataset {
        let instances = labels
            .iter()
            .enumerate()
            .map(|(k, &y)| Instance {
                id: k.to_string(),
                features: cols.iter().map(|c| c[k]).collect(),
                label: Label::from_sign(y).unwrap(),
            })
            .collect();
        let names = (1..=cols.len()).map(|i| format!("f{i}")).collect();
        Dataset::new(names, instances).unwrap()
    }

    #[test]
    fn hand_evaluated_half() {
        let ds = ds_from_columns(&[&[2., 4., 0., 2.]], &[1, 1, -1, -1]);
        assert!((fscore_one(&ds, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let ds = ds_from_columns(&[&[5., 5., 5., 5.]], &[1, 1, -1, -1]);
        assert_eq!(fscore_one(&ds, 1).unwrap(), 0.0);
    }

    #[test]
    fn zero_within_class_variance_is_infinite() {
        let ds = ds_from_columns(&[&[1., 1., 0., 0.]], &[1, 1, -1, -1]);
        assert_eq!(fscore_one(&ds, 1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn small_class_is_an_error() {
        let ds = ds_from_columns(&[&[1., 2., 3.]], &[1, -1, -1]);
        assert!(matches!(
            fscore_one(&ds, 1),
            Err(Error::InsufficientClassSize { class: "positive", count: 1, .. })
        ));
        assert!(matches!(fscore_one(&ds, 2), Err(Error::InvalidSubset(_))));
    }

    #[test]
    fn label_feature_beats_constant() {
        let ds = ds_from_columns(&[&[1., 1., -1., -1.], &[3., 3., 3., 3.]], &[1, 1, -1, -1]);
        assert_eq!(rank_features(&ds).unwrap().order, vec![1, 2]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let a = [1., 2., 3., 0., 1., 1.];
        let ds = ds_from_columns(&[&a, &a, &a], &[1, 1, 1, -1, -1, -1]);
        let r = rank_features(&ds).unwrap();
        assert_eq!(r.order, vec![1, 2, 3]);
        assert_eq!(r.rank_of(3), Some(3));
    }

    #[test]
    fn infinity_outranks_finite() {
        let ds = ds_from_columns(
            &[&[2., 4., 0., 2.], &[1., 1., 0., 0.]],
            &[1, 1, -1, -1],
        );
        assert_eq!(rank_features(&ds).unwrap().order, vec![2, 1]);
    }

    #[test]
    fn elimination_trajectory_shape() {
        let n = 40;
        let labels: Vec<i64> = (0..n).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect();
        let cols: Vec<Vec<f64>> = (0..9)
            .map(|f| {
                (0..n)
                    .map(|k| labels[k] as f64 * (9 - f) as f64 + ((k * (f + 3)) % 7) as f64)
                    .collect()
            })
            .collect();
        let col_refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let ds = ds_from_columns(&col_refs, &labels);
        let spec = PartitionSpec::default();
        let mut calls = 0;
        let stages = backward_eliminate(&ds, &spec, 5, RankingScope::FullDataset, |tr, te| {
            calls += 1;
            assert_eq!(tr.dim(), te.dim());
            Ok((100.0, 100.0))
        })
        .unwrap();
        assert_eq!(calls, 5);
        let sizes: Vec<usize> = stages.iter().map(|s| s.kept.len()).collect();
        assert_eq!(sizes, vec![9, 8, 7, 6, 5]);
        for pair in stages.windows(2) {
            let (a, b) = (&pair[0].kept, &pair[1].kept);
            assert!(b.indices().iter().all(|&i| a.contains(i)));
        }
        let ranking = rank_features(&ds).unwrap();
        assert_eq!(stages[4].kept, ranking.top(5).unwrap());

        let single = backward_eliminate(&ds, &spec, 9, RankingScope::TrainSplit, |_, _| Ok((1.0, 1.0)))
            .unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].kept, FeatureSet::all(9));
        assert!(backward_eliminate(&ds, &spec, 0, RankingScope::FullDataset, |_, _| Ok((0.0, 0.0))).is_err());
    }

    #[test]
    fn tsv_report_layout() {
        let ds = ds_from_columns(&[&[2., 4., 0., 2.], &[1., 1., 0., 0.]], &[1, 1, -1, -1]);
        let r = rank_features(&ds).unwrap();
        let mut buf = Vec::new();
        r.write_tsv(ds.feature_names(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "feature_index\tfeature_name\tfscore\trank\n2\tf2\tinf\t1\n1\tf1\t0.5\t2\n"
        );
    }
}
