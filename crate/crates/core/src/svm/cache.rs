use std::borrow::Cow;

use super::kernel::KernelSpec;

/// Above this many training points the Gram matrix is not materialized.
pub const FULL_GRAM_LIMIT: usize = 4096;

/// Kernel rows for the solver: the full Gram matrix when it is small
/// enough, otherwise rows recomputed on request.
pub(crate) struct GramCache<'a> {
    kernel: KernelSpec,
    points: Vec<&'a [f64]>,
    diag: Vec<f64>,
    full: Option<Vec<f64>>,
}

impl<'a> GramCache<'a> {
    pub fn new(kernel: KernelSpec, points: Vec<&'a [f64]>, full_limit: usize) -> Self {
        let n = points.len();
        let diag = points.iter().map(|p| kernel.eval(p, p)).collect();
        let full = (n <= full_limit).then(|| {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let k = kernel.eval(points[i], points[j]);
                    m[i * n + j] = k;
                    m[j * n + i] = k;
                }
            }
            m
        });
        GramCache {
            kernel,
            points,
            diag,
            full,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn row(&self, i: usize) -> Cow<'_, [f64]> {
        let n = self.len();
        match &self.full {
            Some(m) => Cow::Borrowed(&m[i * n..(i + 1) * n]),
            None => Cow::Owned(
                self.points
                    .iter()
                    .map(|p| self.kernel.eval(self.points[i], p))
                    .collect(),
            ),
        }
    }

    #[cfg(test)]
    pub fn is_full(&self) -> bool {
        self.full.is_some()
    }
}
