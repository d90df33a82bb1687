//! Banded Cholesky factorisation for the shift-invert solves.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Lower factor `L` of a symmetric positive definite band matrix, stored by
/// rows: `L[i][i-k]` lives at `data[i * (bw + 1) + k]` for `k ≤ bw`.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    /// Factors a matrix given by `entry(i, j)` for `i ≥ j ≥ i − bw`.
    /// Returns `None` when a pivot is not positive.
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Option<Self> {
        let w = bw + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = entry(i, j);
                // Σ_k L[i][k] L[j][k] over the overlap of both bands
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= data[i * w + (i - k)] * data[j * w + (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    data[i * w] = sqrt(s);
                } else {
                    data[i * w + (i - j)] = s / data[j * w];
                }
            }
        }
        Some(Self { n, bw, data })
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.data[i * w + (i - k)] * x[k];
            }
            x[i] = s / self.data[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            let k1 = (i + self.bw).min(self.n - 1);
            for k in (i + 1)..=k1 {
                s -= self.data[k * w + (k - i)] * x[k];
            }
            x[i] = s / self.data[i * w];
        }
    }
}
