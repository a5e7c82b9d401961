// SPDX-License-Identifier: Apache-2.0

//! Operator 2-norm through the top eigenpair of the Gram operator `A^H A`.
//!
//! The Krylov space of `A^H A` is built from the normalized all-ones vector
//! with full reorthogonalization. Iteration stops once the top Ritz pair has
//! residual below `1e-13` of its Ritz value, or when the space spans the
//! whole domain, in which case the answer is exact up to rounding. On a
//! Krylov breakdown the iteration restarts from a fresh direction orthogonal
//! to the basis, so an unlucky start cannot hide the top singular direction.

use super::{dot, norm2, CMatrix, Complex};
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SingularPair {
    pub value: f64,
    /// Unit right singular vector for `value`.
    pub right: Vec<Complex>,
}

/// Largest singular value of `a`.
pub fn op_norm2(a: &CMatrix) -> Result<f64> {
    Ok(top_singular(a)?.value)
}

pub fn top_singular(a: &CMatrix) -> Result<SingularPair> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    // a power-of-two rescale is exact and keeps the Gram products in range
    let max_abs = a.max_abs();
    if !a.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    if max_abs > 0.0 && !(2f64.powi(-100)..=2f64.powi(100)).contains(&max_abs) {
        let scale = 2f64.powi(max_abs.log2().floor() as i32);
        let mut pair = top_singular(&a.scale(Complex::new(1.0 / scale, 0.0)))?;
        pair.value *= scale;
        return Ok(pair);
    }
    let n = a.cols();
    let gram_scale = a.frobenius().powi(2);
    let ones = vec![Complex::new(1.0 / (n as f64).sqrt(), 0.0); n];
    if gram_scale == 0.0 {
        return Ok(SingularPair {
            value: 0.0,
            right: ones,
        });
    }

    let mut basis: Vec<Vec<Complex>> = Vec::with_capacity(n);
    let mut diag: Vec<f64> = Vec::with_capacity(n);
    let mut off: Vec<f64> = Vec::with_capacity(n);
    let mut broke_down = false;
    let mut q = ones;

    let (theta, y) = loop {
        let mut w = a.adjoint_matvec(&a.matvec(&q));
        diag.push(dot(&q, &w).re);
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = norm2(&w);
        let k = basis.len();
        if k == n {
            break top_eigenpair(&diag, &off);
        }
        if beta <= 1e-14 * gram_scale {
            broke_down = true;
            off.push(0.0);
            q = restart_vector(&basis, n).unwrap_or_else(|| next_orthogonal(&basis, n));
            continue;
        }
        if !broke_down {
            let (theta, y) = top_eigenpair(&diag, &off);
            let residual = beta * y[k - 1].abs();
            if residual <= RESIDUAL_TOL * theta.abs() {
                break (theta, y);
            }
        }
        off.push(beta);
        q = w.iter().map(|z| z / beta).collect();
    };

    let mut right = vec![Complex::new(0.0, 0.0); n];
    for (b, &c) in basis.iter().zip(&y) {
        for (r, bi) in right.iter_mut().zip(b) {
            *r += bi * c;
        }
    }
    let len = norm2(&right);
    right.iter_mut().for_each(|z| *z /= len);
    Ok(SingularPair {
        value: theta.max(0.0).sqrt(),
        right,
    })
}

/// Deterministic equidistributed vector orthogonalized against `basis`;
/// `None` if it lies almost inside the span.
fn restart_vector(basis: &[Vec<Complex>], n: usize) -> Option<Vec<Complex>> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let k = basis.len() as f64;
    let mut v: Vec<Complex> = (0..n)
        .map(|j| {
            let phase = std::f64::consts::TAU * ((j as f64 + 1.0) * (k + 1.0) * GOLDEN).fract();
            Complex::from_polar(1.0 / (n as f64).sqrt(), phase)
        })
        .collect();
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
    let len = norm2(&v);
    // a unit vector keeps about sqrt((n - k)/n) of its length outside a k-dimensional span
    (len > 0.1 * ((n as f64 - k) / n as f64).sqrt()).then(|| v.into_iter().map(|z| z / len).collect())
}

/// First canonical vector with a substantial component outside `basis`,
/// orthogonalized and normalized.
fn next_orthogonal(basis: &[Vec<Complex>], n: usize) -> Vec<Complex> {
    let mut best: Option<(f64, Vec<Complex>)> = None;
    for j in 0..n {
        let mut v = vec![Complex::new(0.0, 0.0); n];
        v[j] = Complex::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let len = norm2(&v);
        if len > 0.5 {
            return v.into_iter().map(|z| z / len).collect();
        }
        if best.as_ref().is_none_or(|(l, _)| len > *l) {
            best = Some((len, v));
        }
    }
    let (len, v) = best.expect("n > 0");
    v.into_iter().map(|z| z / len).collect()
}

/// Largest eigenvalue and unit eigenvector of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e` (`e.len() + 1 == d.len()`).
fn top_eigenpair(d: &[f64], e: &[f64]) -> (f64, Vec<f64>) {
    let k = d.len();
    debug_assert_eq!(e.len() + 1, k);
    if k == 1 {
        return (d[0], vec![1.0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < k { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    // Bisection on the Sturm count: number of eigenvalues below x.
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..k {
            let e2 = if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 };
            q = d[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * scale;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;
    (theta, tridiagonal_eigenvector(d, e, theta, scale))
}

/// Inverse iteration for a known eigenvalue of a symmetric tridiagonal.
fn tridiagonal_eigenvector(d: &[f64], e: &[f64], theta: f64, scale: f64) -> Vec<f64> {
    let k = d.len();
    let shift = theta + 4.0 * f64::EPSILON * scale;
    let mut x = vec![1.0; k];
    for _ in 0..3 {
        x = solve_tridiagonal(d, e, shift, &x, scale);
        let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 || !len.is_finite() {
            x = vec![1.0 / (k as f64).sqrt(); k];
            break;
        }
        x.iter_mut().for_each(|v| *v /= len);
    }
    x
}

/// Solves `(T - shift·I) x = b` by Gaussian elimination with partial pivoting.
fn solve_tridiagonal(d: &[f64], e: &[f64], shift: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let k = d.len();
    let tiny = f64::EPSILON * scale;
    // Row i holds coefficients for columns i, i+1, i+2 after pivoting.
    let mut a0: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut a1: Vec<f64> = (0..k).map(|i| if i + 1 < k { e[i] } else { 0.0 }).collect();
    let mut a2 = vec![0.0; k];
    let mut sub: Vec<f64> = (0..k).map(|i| if i > 0 { e[i - 1] } else { 0.0 }).collect();
    let mut rhs = b.to_vec();
    for i in 0..k - 1 {
        if sub[i + 1].abs() > a0[i].abs() {
            // swap rows i and i+1
            let (r0, r1, r2) = (sub[i + 1], a0[i + 1], a1[i + 1]);
            let (s0, s1, s2) = (a0[i], a1[i], a2[i]);
            a0[i] = r0;
            a1[i] = r1;
            a2[i] = r2;
            sub[i + 1] = s0;
            a0[i + 1] = s1;
            a1[i + 1] = s2;
            rhs.swap(i, i + 1);
        }
        if a0[i] == 0.0 {
            a0[i] = tiny;
        }
        let m = sub[i + 1] / a0[i];
        a0[i + 1] -= m * a1[i];
        a1[i + 1] -= m * a2[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if a0[k - 1] == 0.0 {
        a0[k - 1] = tiny;
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        if i + 1 < k {
            s -= a1[i] * x[i + 1];
        }
        if i + 2 < k {
            s -= a2[i] * x[i + 2];
        }
        x[i] = s / a0[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[Vec<f64>]) -> CMatrix {
        CMatrix::from_real_rows(rows)
    }

    #[test]
    fn identity_has_unit_norm() {
        assert!((op_norm2(&CMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jordan_2x2_is_golden_ratio() {
        // eigenvalues of A^T A are (3 ± √5)/2, so σ_max = (1 + √5)/2
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let v = op_norm2(&real(&[vec![1.0, 1.0], vec![0.0, 1.0]])).unwrap();
        assert!((v - golden).abs() <= 1e-12 * golden, "{v}");
    }

    #[test]
    fn zero_matrix_has_zero_norm() {
        assert_eq!(op_norm2(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(matches!(op_norm2(&CMatrix::zeros(0, 0)), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn start_vector_in_kernel_still_finds_norm() {
        // all-ones lies in the kernel, true norm is 2
        let v = op_norm2(&real(&[vec![1.0, -1.0], vec![-1.0, 1.0]])).unwrap();
        assert!((v - 2.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn rectangular_input() {
        // [3 4] has norm 5
        let v = op_norm2(&real(&[vec![3.0, 4.0]])).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
    }

    #[test]
    fn all_ones_upper_triangular_closed_form() {
        // inverse is I - C, whose smallest singular value is 2 sin(π/(4M+2))
        for m in [1usize, 2, 5, 17, 40] {
            let u = CMatrix::from_fn(m, m, |i, j| Complex::new(if j >= i { 1.0 } else { 0.0 }, 0.0));
            let expect = 1.0 / (2.0 * (std::f64::consts::PI / (4 * m + 2) as f64).sin());
            let got = op_norm2(&u).unwrap();
            assert!((got - expect).abs() <= 1e-12 * expect, "m={m}: {got} vs {expect}");
        }
    }

    #[test]
    fn right_vector_attains_norm() {
        let a = real(&[vec![2.0, 1.0, 0.0], vec![0.5, -1.0, 3.0]]);
        let pair = top_singular(&a).unwrap();
        let av = norm2(&a.matvec(&pair.right));
        assert!((av - pair.value).abs() < 1e-12 * pair.value);
    }

    #[test]
    fn low_rank_outer_products() {
        // ‖u v^H‖ = ‖u‖‖v‖; every later Krylov step breaks down
        for n in [3usize, 17, 64] {
            let u: Vec<Complex> = (0..n).map(|i| Complex::new((i as f64).sin(), 0.5)).collect();
            let v: Vec<Complex> = (0..n).map(|j| Complex::new(1.0, j as f64 * 0.1)).collect();
            let a = CMatrix::from_fn(n, n, |i, j| u[i] * v[j].conj());
            let expect = norm2(&u) * norm2(&v);
            assert!((op_norm2(&a).unwrap() - expect).abs() <= 1e-12 * expect, "n={n}");
            let b = a.add(&CMatrix::from_fn(n, n, |i, j| {
                if i == j && i == n - 1 {
                    Complex::new(3.0 * expect, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }));
            assert!(op_norm2(&b).unwrap() >= 3.0 * expect * (1.0 - 1e-12), "n={n}");
        }
    }
}
