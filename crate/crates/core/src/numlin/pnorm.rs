// SPDX-License-Identifier: Apache-2.0

//! ℓ_p operator norms of entrywise nonnegative matrices.
//!
//! Boyd's power method: `x ← ψ_q(Pᵀ ψ_p(P x))`, normalized, where
//! `ψ_r(y) = y^{r-1}` componentwise. From a positive start the ratio
//! `‖Px‖_p / ‖x‖_p` increases to the norm. Each step also yields the upper
//! bound `max_i ((Pᵀ (Px)^{p-1})_i / x_i^{p-1})^{1/p}` valid for any positive
//! `x`, and iteration stops once the two bounds agree to `1e-12`.

use super::{CMatrix, Complex};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;
const GAP_TOL: f64 = 1e-12;

/// Square matrix with real nonnegative entries.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegMatrix(CMatrix);

impl NonnegMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        m.require_square()?;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if z.im != 0.0 || z.re < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: if z.im != 0.0 { f64::NAN } else { z.re },
                    });
                }
            }
        }
        Ok(NonnegMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)].re
    }

    pub fn as_cmatrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_cmatrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        NonnegMatrix(self.0.scale(Complex::new(c.abs(), 0.0)))
    }

    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub(crate) fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| self.get(i, j) * y[i]).sum()).collect()
    }

    pub(crate) fn max_column_sum(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j)).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn pnorm_vec(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖P‖_{ℓ_p → ℓ_p}` for `p ∈ [1, ∞)`.
pub fn pnorm_nonneg(p_mat: &NonnegMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")));
    }
    let n = p_mat.dim();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if p == 1.0 {
        return Ok(p_mat.max_column_sum());
    }
    let q = p / (p - 1.0);
    let mut x = vec![1.0; n];
    let mut lower = 0.0f64;
    let mut last = f64::NAN;
    for _ in 0..MAX_ITERATIONS {
        let xn = pnorm_vec(&x, p);
        x.iter_mut().for_each(|v| *v /= xn);
        let px = p_mat.apply(&x);
        let est = pnorm_vec(&px, p);
        lower = lower.max(est);
        if est == 0.0 {
            return Ok(0.0);
        }
        let w = p_mat.apply_transpose(&px.iter().map(|v| v.powf(p - 1.0)).collect::<Vec<_>>());
        let upper = if x.iter().all(|&v| v > 0.0) {
            w.iter()
                .zip(&x)
                .map(|(wi, xi)| wi / xi.powf(p - 1.0))
                .fold(0.0, f64::max)
                .powf(1.0 / p)
        } else {
            f64::INFINITY
        };
        if upper - lower <= GAP_TOL * lower || (est - last).abs() <= 1e-15 * est {
            break;
        }
        last = est;
        x = w.iter().map(|v| v.powf(q - 1.0)).collect();
        if x.iter().all(|&v| v == 0.0) {
            break;
        }
    }
    Ok(lower)
}
