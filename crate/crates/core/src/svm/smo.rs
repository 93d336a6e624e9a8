//! Sequential minimal optimization for the soft-margin dual
//!
//! ```text
//! min  ½ αᵀQα - eᵀα    s.t.  yᵀα = 0,  0 ≤ αₖ ≤ C,   Qₖₗ = yₖ yₗ K(xₖ, xₗ)
//! ```
//!
//! Each step picks the maximal violating pair (i, j), i from
//! I_up = {α < C, y = +1} ∪ {α > 0, y = -1} maximizing -yG and j from
//! I_low = {α < C, y = -1} ∪ {α > 0, y = +1} minimizing -yG, then solves the
//! two-variable subproblem in closed form. The solver stops when
//! max_up(-yG) - min_low(-yG) < tol, so that any bias inside that interval
//! satisfies every KKT condition to within tol, and the primal-dual gap
//! αᵀG + C Σ ξₖ is at most `gap_tol · max(1, |W(α)|)`. The second test
//! bounds how far the dual objective W can sit below its maximum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cache::GramCache;
use crate::error::{Error, Result};

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

/// Relative distance from a bound below which a multiplier is treated as
/// bounded, both in the bias and in the returned solution.
const BOUND_SNAP: f64 = 1e-12;

pub(crate) struct SmoProblem<'a> {
    pub gram: GramCache<'a>,
    pub y: Vec<f64>,
    pub c: f64,
    pub tol: f64,
    pub gap_tol: f64,
    pub max_iter: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: u64,
    /// max_up(-yG) - min_low(-yG) at exit.
    pub gap: f64,
    pub dual_objective: f64,
}

impl SmoProblem<'_> {
    fn in_up(&self, alpha: f64, y: f64) -> bool {
        if y > 0.0 {
            alpha < self.c
        } else {
            alpha > 0.0
        }
    }

    fn in_low(&self, alpha: f64, y: f64) -> bool {
        if y > 0.0 {
            alpha > 0.0
        } else {
            alpha < self.c
        }
    }

    pub fn solve(&self) -> Result<SmoSolution> {
        let n = self.gram.len();
        let c = self.c;
        let y = &self.y;
        let mut alpha = vec![0.0; n];
        let mut grad = vec![-1.0; n];

        // Tie-breaking scan order; the only use of the seed.
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));

        let mut iterations = 0u64;
        let gap = loop {
            let mut gmax = f64::NEG_INFINITY;
            let mut gmin = f64::INFINITY;
            let mut pick_i = None;
            let mut pick_j = None;
            for &t in &order {
                let v = -y[t] * grad[t];
                if self.in_up(alpha[t], y[t]) && v > gmax {
                    gmax = v;
                    pick_i = Some(t);
                }
                if self.in_low(alpha[t], y[t]) && v < gmin {
                    gmin = v;
                    pick_j = Some(t);
                }
            }
            let (i, j) = match (pick_i, pick_j) {
                (Some(i), Some(j)) if gmax > gmin => (i, j),
                _ => break 0.0,
            };
            if gmax - gmin < self.tol && self.duality_gap_met(&alpha, &grad) {
                break gmax - gmin;
            }
            if iterations >= self.max_iter {
                return Err(Error::ConvergenceFailure {
                    iterations,
                    worst_violation: gmax - gmin,
                });
            }
            iterations += 1;

            let row_i = self.gram.row(i);
            let row_j = self.gram.row(j);
            let q_ij = y[i] * y[j] * row_i[j];
            let (old_i, old_j) = (alpha[i], alpha[j]);
            let (mut ai, mut aj) = (old_i, old_j);

            if y[i] != y[j] {
                let mut quad = self.gram.diag(i) + self.gram.diag(j) + 2.0 * q_ij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = ai - aj;
                ai += delta;
                aj += delta;
                if diff > 0.0 {
                    if aj < 0.0 {
                        aj = 0.0;
                        ai = diff;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = -diff;
                }
                if diff > 0.0 {
                    if ai > c {
                        ai = c;
                        aj = c - diff;
                    }
                } else if aj > c {
                    aj = c;
                    ai = c + diff;
                }
            } else {
                let mut quad = self.gram.diag(i) + self.gram.diag(j) - 2.0 * q_ij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let delta = (grad[i] - grad[j]) / quad;
                let sum = ai + aj;
                ai -= delta;
                aj += delta;
                if sum > c {
                    if ai > c {
                        ai = c;
                        aj = sum - c;
                    }
                } else if aj < 0.0 {
                    aj = 0.0;
                    ai = sum;
                }
                if sum > c {
                    if aj > c {
                        aj = c;
                        ai = sum - c;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = sum;
                }
            }
            alpha[i] = ai;
            alpha[j] = aj;

            let di = (ai - old_i) * y[i];
            let dj = (aj - old_j) * y[j];
            for k in 0..n {
                grad[k] += y[k] * (row_i[k] * di + row_j[k] * dj);
            }
        };

        // Report near-bound multipliers as bounded, consistent with the bias.
        let eps = BOUND_SNAP * c;
        for a in alpha.iter_mut() {
            if *a <= eps {
                *a = 0.0;
            } else if *a >= c - eps {
                *a = c;
            }
        }
        let bias = self.bias(&alpha, &grad);
        let dual_objective = dual_objective(&alpha, &grad);
        log::debug!("SMO converged after {iterations} pair updates, gap {gap:e}");
        Ok(SmoSolution {
            alpha,
            bias,
            iterations,
            gap,
            dual_objective,
        })
    }

    fn duality_gap_met(&self, alpha: &[f64], grad: &[f64]) -> bool {
        let b = self.bias(alpha, grad);
        // yₖf(xₖ) = 1 + Gₖ + yₖb
        let slack: f64 = grad
            .iter()
            .zip(&self.y)
            .map(|(g, y)| (-g - y * b).max(0.0))
            .sum();
        let gap = alpha.iter().zip(grad).map(|(a, g)| a * g).sum::<f64>() + self.c * slack;
        gap <= self.gap_tol * dual_objective(alpha, grad).abs().max(1.0)
    }

    /// Mean of -yG over free vectors; otherwise the midpoint of the interval
    /// allowed by the bound vectors. Multipliers within `BOUND_SNAP · C` of a
    /// bound count as on it, so a value a few ulps below C does not pin the
    /// bias to one end of an otherwise open interval.
    fn bias(&self, alpha: &[f64], grad: &[f64]) -> f64 {
        let eps = BOUND_SNAP * self.c;
        let mut free_sum = 0.0;
        let mut free_n = 0usize;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for k in 0..alpha.len() {
            let v = -self.y[k] * grad[k];
            let a = if alpha[k] <= eps {
                0.0
            } else if alpha[k] >= self.c - eps {
                self.c
            } else {
                alpha[k]
            };
            let up = self.in_up(a, self.y[k]);
            let low = self.in_low(a, self.y[k]);
            match (up, low) {
                (true, true) => {
                    free_sum += v;
                    free_n += 1;
                }
                (true, false) => lower = lower.max(v),
                (false, true) => upper = upper.min(v),
                (false, false) => {}
            }
        }
        if free_n > 0 {
            free_sum / free_n as f64
        } else {
            match (lower.is_finite(), upper.is_finite()) {
                (true, true) => 0.5 * (lower + upper),
                (true, false) => lower,
                (false, true) => upper,
                (false, false) => 0.0,
            }
        }
    }
}

/// W(α) = Σα - ½αᵀQα = ½ Σ αₖ(1 - Gₖ).
fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    0.5 * alpha.iter().zip(grad).map(|(a, g)| a - a * g).sum::<f64>()
}
