// SPDX-License-Identifier: Apache-2.0

//! Eigenvalues of small dense matrices: Householder reduction to Hessenberg
//! form followed by single-shift complex QR with Wilkinson shifts.

use super::{CMatrix, Complex};
use crate::error::{Error, Result};

pub const MAX_EIGEN_DIM: usize = 64;

/// QR sweeps allowed per eigenvalue before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 60;

/// `sup Re σ(A)`
pub fn spectral_bound(a: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// All eigenvalues, in deflation order.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex>> {
    let n = a.require_square()?;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n > MAX_EIGEN_DIM {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues limited to dimension {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    let mut h: Vec<Vec<Complex>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    hessenberg(&mut h);
    shifted_qr(h)
}

fn hessenberg(h: &mut [Vec<Complex>]) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex> = (k + 1..n).map(|i| h[i][k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);
        // H <- (I - 2vv^H) H
        for j in 0..n {
            let s: Complex = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[k + 1 + r][j]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[k + 1 + r][j] -= 2.0 * vr * s;
            }
        }
        // H <- H (I - 2vv^H)
        for row in h.iter_mut() {
            let s: Complex = v.iter().enumerate().map(|(r, vr)| row[k + 1 + r] * vr).sum();
            for (r, vr) in v.iter().enumerate() {
                row[k + 1 + r] -= 2.0 * s * vr.conj();
            }
        }
        for row in h.iter_mut().skip(k + 2) {
            row[k] = Complex::new(0.0, 0.0);
        }
    }
}

fn shifted_qr(mut h: Vec<Vec<Complex>>) -> Result<Vec<Complex>> {
    let n = h.len();
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = SWEEPS_PER_EIGENVALUE * n;
    loop {
        if hi == 0 {
            eig.push(h[0][0]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let scale = h[l][l].norm() + h[l - 1][l - 1].norm();
            let sub = h[l][l - 1].norm();
            if sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE {
                h[l][l - 1] = Complex::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > SWEEPS_PER_EIGENVALUE || total > cap {
            return Err(Error::NoConvergence {
                iterations: total,
                diagonal: (l..=hi).map(|i| h[i][i]).collect(),
                subdiagonal: (l + 1..=hi).map(|i| h[i][i - 1]).collect(),
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            h[hi][hi]
                + Complex::new(
                    h[hi][hi - 1].re.abs() + if hi >= 2 { h[hi - 1][hi - 2].re.abs() } else { 0.0 },
                    0.0,
                )
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        qr_sweep(&mut h, l, hi, mu);
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex, b: Complex, c: Complex, d: Complex) -> Complex {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let (e1, e2) = (tr_half + disc, tr_half - disc);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit shifted QR step on the active window `l..=hi`.
fn qr_sweep(h: &mut [Vec<Complex>], l: usize, hi: usize, mu: Complex) {
    for i in l..=hi {
        h[i][i] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let (x, y) = (h[k][j], h[k + 1][j]);
            h[k][j] = c * x + s * y;
            h[k + 1][j] = -s.conj() * x + c * y;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = l + idx;
        for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(l) {
            let (x, y) = (row[k], row[k + 1]);
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for i in l..=hi {
        h[i][i] += mu;
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex, y: Complex) -> (f64, Complex) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == 0.0 {
        return (1.0, Complex::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex::new(1.0, 0.0));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn nilpotent_shift_has_zero_bound() {
        let c4 = CMatrix::from_fn(4, 4, |i, j| Complex::new(if j == i + 1 { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(spectral_bound(&c4).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_bound() {
        let a = CMatrix::diag(&[Complex::new(-1.0, 0.0), Complex::new(-3.0, 0.0)]);
        assert_eq!(spectral_bound(&a).unwrap(), -1.0);
    }

    #[test]
    fn shifted_jordan_block() {
        let a = CMatrix::from_real_rows(&[vec![4.0, 1.0], vec![0.0, 4.0]]);
        assert!((spectral_bound(&a).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = CMatrix::from_real_rows(&[vec![0.0, -2.0], vec![2.0, 0.0]]);
        let mut e = eigenvalues(&a).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - Complex::new(0.0, -2.0)).norm() < 1e-12);
        assert!((e[1] - Complex::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = CMatrix::from_real_rows(&[vec![6.0, -11.0, 6.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let r = sorted_re(eigenvalues(&a).unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(eigenvalues(&CMatrix::identity(65)).is_err());
    }
}
