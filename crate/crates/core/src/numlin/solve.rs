// SPDX-License-Identifier: Apache-2.0

use super::{CMatrix, Complex};
use crate::error::{Error, Result};

/// Systems whose 1-norm condition estimate exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e14;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    // L (unit, strictly below diagonal) and U packed row-major.
    lu: Vec<Complex>,
    perm: Vec<usize>,
    norm1: f64,
}

impl Lu {
    /// Fails with [`Error::NearSpectrum`] on an exactly zero pivot.
    pub fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.require_square()?;
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut lu = a.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(Error::NearSpectrum {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                if m != Complex::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= m * u;
                    }
                }
            }
        }
        Ok(Lu {
            n,
            lu,
            perm,
            norm1: a.norm1(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^H = U^H L^H P
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![Complex::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Hager's estimate of `‖A^{-1}‖₁`, a lower bound that is usually exact.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            let new_est: f64 = y.iter().map(|z| z.norm()).sum();
            if new_est <= est {
                break;
            }
            est = new_est;
            let sign: Vec<Complex> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r == 0.0 {
                        Complex::new(1.0, 0.0)
                    } else {
                        z / r
                    }
                })
                .collect();
            let z = self.solve_adjoint(&sign);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex::new(0.0, 0.0); n];
            x[j] = Complex::new(1.0, 0.0);
        }
        // Higham's alternating-sign safeguard vector.
        let alt: Vec<Complex> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                let denom = (n.max(2) - 1) as f64;
                Complex::new(s * (1.0 + i as f64 / denom), 0.0)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est)
    }

    /// 1-norm condition estimate `‖A‖₁ · est(‖A^{-1}‖₁)`.
    pub fn condition_estimate(&self) -> f64 {
        self.norm1 * self.inverse_norm1_estimate()
    }

    /// Fails with [`Error::NearSpectrum`] if the condition estimate exceeds
    /// [`CONDITION_LIMIT`].
    pub fn ensure_well_conditioned(&self) -> Result<()> {
        let condition = self.condition_estimate();
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(Error::NearSpectrum { condition });
        }
        Ok(())
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![Complex::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = Complex::new(0.0, 0.0);
        }
        inv
    }
}

fn lambda_minus(a: &CMatrix, lambda: Complex) -> Result<CMatrix> {
    a.require_square()?;
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::NonFinite("lambda"));
    }
    Ok(a.scale(Complex::new(-1.0, 0.0)).shift_diagonal(lambda))
}

/// Solves `(λI - A) x = g`.
pub fn resolvent_apply(a: &CMatrix, lambda: Complex, g: &[Complex]) -> Result<Vec<Complex>> {
    let m = lambda_minus(a, lambda)?;
    if g.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for {}x{} operator",
            g.len(),
            m.rows(),
            m.cols()
        )));
    }
    let lu = Lu::factor(&m)?;
    lu.ensure_well_conditioned()?;
    Ok(lu.solve(g))
}

/// The matrix `(λI - A)^{-1}`.
pub fn resolvent_matrix(a: &CMatrix, lambda: Complex) -> Result<CMatrix> {
    let lu = Lu::factor(&lambda_minus(a, lambda)?)?;
    lu.ensure_well_conditioned()?;
    Ok(lu.inverse())
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let lu = Lu::factor(a)?;
    lu.ensure_well_conditioned()?;
    Ok(lu.inverse())
}
