//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the solver or the F-score code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wbcsvm::dataset::{load_wbc, LoadOptions};
use wbcsvm::{Dataset, Instance, Label, SvmModel, WBC_DATA};

pub fn wbc() -> Dataset {
    load_wbc(WBC_DATA.as_bytes(), LoadOptions::default()).unwrap()
}

pub fn dataset(rows: &[(Vec<f64>, Label)]) -> Dataset {
    let dim = rows.first().map_or(0, |r| r.0.len());
    let instances = rows
        .iter()
        .enumerate()
        .map(|(k, (x, y))| Instance {
            id: format!("r{k}"),
            features: x.clone(),
            label: *y,
        })
        .collect();
    Dataset::new((1..=dim).map(|i| format!("x{i}")).collect(), instances).unwrap()
}

/// Straight transcription of the F-score formula with two-pass means.
pub fn fscore_direct(values: &[f64], labels: &[Label]) -> f64 {
    let pos: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, l)| **l == Label::Positive)
        .map(|(v, _)| *v)
        .collect();
    let neg: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, l)| **l == Label::Negative)
        .map(|(v, _)| *v)
        .collect();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let grand = mean(values);
    let mean_pos = mean(&pos);
    let mean_neg = mean(&neg);
    let numerator = (mean_pos - grand).powi(2) + (mean_neg - grand).powi(2);
    let var_pos = pos.iter().map(|x| (x - mean_pos).powi(2)).sum::<f64>() / (pos.len() - 1) as f64;
    let var_neg = neg.iter().map(|x| (x - mean_neg).powi(2)).sum::<f64>() / (neg.len() - 1) as f64;
    let denominator = var_pos + var_neg;
    if denominator == 0.0 {
        if numerator == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator / denominator
    }
}

pub fn column(ds: &Dataset, index: usize) -> (Vec<f64>, Vec<Label>) {
    ds.instances()
        .iter()
        .map(|i| (i.features[index - 1], i.label))
        .unzip()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300) || a == b
}

fn gram(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

/// Dual objective Σα - ½ΣΣ αₖαₗyₖyₗ⟨xₖ, xₗ⟩ for the linear kernel.
pub fn dual_objective(points: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let k = gram(points);
    let n = points.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Exact maximum of the linear-kernel dual by enumerating every assignment
/// of each multiplier to {0, C, free} and solving the equality-constrained
/// stationarity system on the free block (least squares via SVD).
pub fn qp_brute_force(points: &[Vec<f64>], y: &[f64], c: f64) -> (f64, Vec<f64>) {
    let n = points.len();
    let k = gram(points);
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let combos = 3usize.pow(n as u32);
    for code in 0..combos {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let at_c: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut alpha = vec![0.0; n];
        for &i in &at_c {
            alpha[i] = c;
        }
        let fixed_balance: f64 = at_c.iter().map(|&i| c * y[i]).sum();
        if free.is_empty() {
            if fixed_balance.abs() > 1e-12 {
                continue;
            }
        } else {
            let m = free.len();
            let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut b = DVector::<f64>::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q(i, j);
                }
                a[(r, m)] = y[i];
                a[(m, r)] = y[i];
                b[r] = 1.0 - at_c.iter().map(|&j| q(i, j) * c).sum::<f64>();
            }
            b[m] = -fixed_balance;
            let svd = a.clone().svd(true, true);
            let Ok(x) = svd.solve(&b, 1e-10) else { continue };
            if (&a * &x - &b).norm() > 1e-7 * (1.0 + b.norm()) {
                continue;
            }
            let mut feasible = true;
            for (r, &i) in free.iter().enumerate() {
                let v = x[r];
                if v < -1e-9 || v > c + 1e-9 {
                    feasible = false;
                    break;
                }
                alpha[i] = v.clamp(0.0, c);
            }
            if !feasible {
                continue;
            }
            let balance: f64 = alpha.iter().zip(y).map(|(a, y)| a * y).sum();
            if balance.abs() > 1e-7 {
                continue;
            }
        }
        let w = dual_objective(points, y, &alpha);
        if w > best.0 {
            best = (w, alpha);
        }
    }
    best
}

/// Exhaustive grid over the first n-1 multipliers (step `step`), the last
/// one fixed by the equality constraint.
pub fn qp_grid(points: &[Vec<f64>], y: &[f64], c: f64, step: f64) -> f64 {
    let n = points.len();
    let k = gram(points);
    let steps = (c / step).round() as usize;
    let last = n - 1;
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; last];
    let mut alpha = vec![0.0; n];
    loop {
        for p in 0..last {
            alpha[p] = idx[p] as f64 * step;
        }
        let balance: f64 = (0..last).map(|p| alpha[p] * y[p]).sum();
        let a_last = -balance * y[last];
        if (-1e-12..=c + 1e-12).contains(&a_last) {
            alpha[last] = a_last.clamp(0.0, c);
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
                }
            }
            let w = alpha.iter().sum::<f64>() - 0.5 * quad;
            best = best.max(w);
        }
        let mut p = 0;
        loop {
            if p == last {
                return best;
            }
            idx[p] += 1;
            if idx[p] <= steps {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Every KKT condition of the trained model on its own training set,
/// plus the box and equality constraints. Returns human-readable failures.
pub fn kkt_failures(model: &SvmModel, train: &Dataset, tol: f64) -> Vec<String> {
    let alphas = model.alphas();
    let c = model.c();
    let mut failures = Vec::new();
    let mut balance = 0.0;
    for (k, (inst, &a)) in train.instances().iter().zip(&alphas).enumerate() {
        let y = inst.label.sign();
        balance += a * y;
        if !(0.0..=c).contains(&a) {
            failures.push(format!("alpha[{k}] = {a} outside [0, {c}]"));
        }
        let margin = y * model.discriminant(&inst.features).unwrap();
        let ok = if a == 0.0 {
            margin >= 1.0 - tol
        } else if a == c {
            margin <= 1.0 + tol
        } else {
            (margin - 1.0).abs() <= tol
        };
        if !ok {
            failures.push(format!("example {k}: alpha {a}, y*D {margin}"));
        }
    }
    if balance.abs() > 1e-8 {
        failures.push(format!("sum alpha*y = {balance:e}"));
    }
    failures
}

/// Random linear-kernel problem with both classes, features in [-2, 2]^2.
pub fn random_small_problem(rng: &mut ChaCha8Rng, max_points: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(2..=max_points);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0)])
        .collect();
    let mut y: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[1] = -1.0;
    (points, y)
}

pub fn to_dataset(points: &[Vec<f64>], y: &[f64]) -> Dataset {
    let rows: Vec<(Vec<f64>, Label)> = points
        .iter()
        .zip(y)
        .map(|(p, &s)| (p.clone(), if s > 0.0 { Label::Positive } else { Label::Negative }))
        .collect();
    dataset(&rows)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random integer-valued dataset (values 1..=10) with at least two
/// instances per class. Some columns are forced constant to exercise the
/// degenerate branches.
pub fn random_fscore_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n_pos = rng.random_range(2..=12);
    let n_neg = rng.random_range(2..=12);
    let dim = rng.random_range(1..=4);
    let constant_col: Option<(usize, f64)> = rng
        .random_bool(0.2)
        .then(|| (rng.random_range(0..dim), rng.random_range(1..=10) as f64));
    let per_class_constant = rng.random_bool(0.1);
    let rows: Vec<(Vec<f64>, Label)> = (0..n_pos + n_neg)
        .map(|k| {
            let label = if k < n_pos { Label::Positive } else { Label::Negative };
            let x = (0..dim)
                .map(|d| match constant_col {
                    Some((col, v)) if col == d => {
                        if per_class_constant && label == Label::Positive {
                            v.min(9.0) + 1.0
                        } else {
                            v
                        }
                    }
                    _ => rng.random_range(1..=10) as f64,
                })
                .collect();
            (x, label)
        })
        .collect();
    dataset(&rows)
}

/// Scale factor m·2^e with a 20-bit mantissa: products with values in
/// 1..=10 are exact, so the transformed data carry no rounding of their own.
pub fn exact_scale(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1..=1u32 << 20) as f64 * 2f64.powi(rng.random_range(-8..=8))
}

/// Shift by a multiple of 1/16, exact for the same reason.
pub fn exact_shift(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-160..=160) as f64 / 16.0
}

pub fn map_column(ds: &Dataset, index: usize, f: impl Fn(f64) -> f64) -> Dataset {
    let instances = ds
        .instances()
        .iter()
        .map(|i| {
            let mut i = i.clone();
            i.features[index - 1] = f(i.features[index - 1]);
            i
        })
        .collect();
    Dataset::new(ds.feature_names().to_vec(), instances).unwrap()
}

/// Oracle equivalence plus scale, shift and label-swap invariance for every
/// feature, and ranking consistency. Returns a description of each failure.
pub fn fscore_property_failures(ds: &Dataset, rng: &mut ChaCha8Rng) -> Vec<String> {
    use wbcsvm::fscore::{fscore_one, rank_features};
    let mut failures = Vec::new();
    let swapped = ds.with_labels_flipped();
    let mut scores = Vec::new();
    for index in 1..=ds.dim() {
        let f = fscore_one(ds, index).unwrap();
        scores.push((index, f));
        let (values, labels) = column(ds, index);
        let oracle = fscore_direct(&values, &labels);
        if !rel_close(f, oracle, 1e-9) {
            failures.push(format!("feature {index}: {f} vs oracle {oracle}"));
        }
        if f < 0.0 || f.is_nan() {
            failures.push(format!("feature {index}: negative or NaN score {f}"));
        }
        let c = exact_scale(rng);
        let scaled = fscore_one(&map_column(ds, index, |x| x * c), index).unwrap();
        if !rel_close(f, scaled, 1e-9) {
            failures.push(format!("feature {index}: scaled by {c} gives {scaled}, was {f}"));
        }
        let k = exact_shift(rng);
        let shifted = fscore_one(&map_column(ds, index, |x| x + k), index).unwrap();
        if !rel_close(f, shifted, 1e-9) {
            failures.push(format!("feature {index}: shifted by {k} gives {shifted}, was {f}"));
        }
        let s = fscore_one(&swapped, index).unwrap();
        if !rel_close(f, s, 1e-9) {
            failures.push(format!("feature {index}: label swap gives {s}, was {f}"));
        }
    }
    scores.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let expected: Vec<usize> = scores.iter().map(|s| s.0).collect();
    let ranking = rank_features(ds).unwrap();
    if ranking.order != expected {
        failures.push(format!("ranking {:?}, sorted scores {:?}", ranking.order, expected));
    }
    failures
}

/// Header, zero-weight and sign-rule checks on the rendered training and
/// test reports of `model`.
pub fn report_format_failures(model: &SvmModel, train: &Dataset, test: &Dataset) -> Vec<String> {
    use wbcsvm::svm::{report_test, report_training, write_test_report, write_training_report};
    let mut failures = Vec::new();
    let mut buf = Vec::new();
    write_training_report(&report_training(model, train).unwrap(), &mut buf).unwrap();
    let training = String::from_utf8(buf).unwrap();
    let mut lines = training.lines();
    if lines.next() != Some("example\tclass\tweight\ttrain_classification\ttrain_discriminant") {
        failures.push("training header".into());
    }
    let sv_ids: std::collections::HashSet<&str> =
        model.support_vectors().iter().map(|s| s.id.as_str()).collect();
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            failures.push(format!("training row `{line}`"));
            continue;
        }
        let weight: f64 = f[2].parse().unwrap();
        if !sv_ids.contains(f[0]) && weight != 0.0 {
            failures.push(format!("non-support vector {} has weight {}", f[0], f[2]));
        }
        if sv_ids.contains(f[0]) && weight.signum() != f[1].parse::<f64>().unwrap() {
            failures.push(format!("weight sign of {} disagrees with class", f[0]));
        }
        if f[3] != sign_rule(f[4].parse().unwrap()) {
            failures.push(format!("training row {}: {} for D = {}", f[0], f[3], f[4]));
        }
    }
    if rows != train.len() {
        failures.push(format!("training report has {rows} rows for {} examples", train.len()));
    }
    let mut buf = Vec::new();
    write_test_report(&report_test(model, test).unwrap(), &mut buf).unwrap();
    let report = String::from_utf8(buf).unwrap();
    let mut lines = report.lines();
    if lines.next() != Some("example\tclassification\tdiscriminant") {
        failures.push("test header".into());
    }
    for line in lines {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 || f[1] != sign_rule(f[2].parse().unwrap()) {
            failures.push(format!("test row `{line}`"));
        }
    }
    failures
}

/// Positive discriminant is class 1, anything else -1.
pub fn sign_rule(d: f64) -> &'static str {
    if d > 0.0 {
        "1"
    } else {
        "-1"
    }
}
