// SPDX-License-Identifier: Apache-2.0

//! The nilpotent shift `C_M` (ones on the superdiagonal) and its closed-form
//! resolvent and exponential.
//!
//! `(z - C_M)^{-1}` is upper-triangular Toeplitz with `z^{-1-k}` on the k-th
//! superdiagonal and `e^{tC_M}` carries `t^k/k!` there. Both are built
//! directly from these formulas; generic inversion and `expm` only serve as
//! cross-checks in tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{op_norm2, CMatrix, Complex};

/// Slack used when checking computed norms against the closed-form bounds.
pub const BOUND_SLACK: f64 = 1e-9;

/// `|z|` within this of 1 counts as unit modulus.
const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShiftBlock {
    dim: usize,
}

impl ShiftBlock {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "shift block dimension M must be at least 1".into(),
            ));
        }
        Ok(ShiftBlock { dim: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> CMatrix {
        toeplitz_upper(self.dim, |k| {
            if k == 1 {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    /// `(z - C_M)^{-1}`
    pub fn resolvent(&self, z: Complex) -> Result<CMatrix> {
        if z == Complex::new(0.0, 0.0) {
            return Err(Error::ZeroInShiftSpectrum);
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        // one division, then repeated multiplication
        let inv = z.inv();
        let mut powers = Vec::with_capacity(self.dim);
        let mut acc = inv;
        for _ in 0..self.dim {
            powers.push(acc);
            acc *= inv;
        }
        Ok(toeplitz_upper(self.dim, |k| powers[k]))
    }

    /// `e^{tC_M}`
    pub fn exp(&self, t: f64) -> CMatrix {
        let mut coeffs = Vec::with_capacity(self.dim);
        let mut acc = 1.0;
        for k in 0..self.dim {
            if k > 0 {
                acc *= t / k as f64;
            }
            coeffs.push(Complex::new(acc, 0.0));
        }
        toeplitz_upper(self.dim, |k| coeffs[k])
    }

    /// Closed-form upper bound `1/(|z| - 1)` on `‖(z - C_M)^{-1}‖`, valid for
    /// `|z| > 1`; `None` otherwise.
    pub fn resolvent_bound(z: Complex) -> Option<f64> {
        let r = z.norm();
        (r > 1.0).then(|| 1.0 / (r - 1.0))
    }

    pub fn bounds_report(&self, z: Complex) -> Result<ShiftBoundsReport> {
        let norm = op_norm2(&self.resolvent(z)?)?;
        let r = z.norm();
        let lower = ((r - 1.0).abs() <= UNIT_MODULUS_TOL).then(|| (self.dim as f64).sqrt());
        let upper = Self::resolvent_bound(z);
        let violation =
            lower.is_some_and(|lo| norm < lo - BOUND_SLACK) || upper.is_some_and(|hi| norm > hi + BOUND_SLACK);
        Ok(ShiftBoundsReport {
            m: self.dim,
            lambda: z,
            norm,
            lower,
            upper,
            violation,
        })
    }
}

/// Norm of `(z - C_M)^{-1}` with the applicable closed-form bounds: `√M`
/// below on the unit circle, `1/(|z| - 1)` above outside the unit disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftBoundsReport {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(with = "crate::io::complex_pair")]
    pub lambda: Complex,
    pub norm: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub violation: bool,
}

fn toeplitz_upper(m: usize, diag: impl Fn(usize) -> Complex) -> CMatrix {
    CMatrix::from_fn(m, m, |i, j| if j >= i { diag(j - i) } else { Complex::new(0.0, 0.0) })
}

pub fn make_shift(m: usize) -> Result<CMatrix> {
    Ok(ShiftBlock::new(m)?.matrix())
}

pub fn shift_resolvent(m: usize, lambda: Complex) -> Result<CMatrix> {
    ShiftBlock::new(m)?.resolvent(lambda)
}

pub fn shift_exp(m: usize, t: f64) -> Result<CMatrix> {
    Ok(ShiftBlock::new(m)?.exp(t))
}

pub fn shift_bounds_report(m: usize, lambda: Complex) -> Result<ShiftBoundsReport> {
    ShiftBlock::new(m)?.bounds_report(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{expm, resolvent_apply};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn shift_matrices() {
        assert_eq!(make_shift(1).unwrap(), CMatrix::zeros(1, 1));
        assert_eq!(
            make_shift(3).unwrap(),
            CMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]])
        );
        assert!(make_shift(0).is_err());
    }

    #[test]
    fn shift_has_unit_norm() {
        for m in 2..20 {
            assert!((op_norm2(&make_shift(m).unwrap()).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn resolvent_examples() {
        assert_eq!(
            shift_resolvent(2, c(1.0, 0.0)).unwrap(),
            CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])
        );
        let r = shift_resolvent(3, c(2.0, 0.0)).unwrap();
        assert_eq!(r[(0, 0)], c(0.5, 0.0));
        assert_eq!(r[(1, 1)], c(0.5, 0.0));
        assert_eq!(r[(1, 2)], c(0.25, 0.0));
        assert_eq!(r[(0, 1)], c(0.25, 0.0));
        assert_eq!(r[(0, 2)], c(0.125, 0.0));
        let r = shift_resolvent(1, c(0.0, 1.0)).unwrap();
        assert!((r[(0, 0)] - c(0.0, -1.0)).norm() < 1e-16);
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let err = shift_resolvent(4, c(0.0, 0.0)).unwrap_err();
        assert_eq!(err.to_string(), "0 is the spectrum of C_M");
        assert!(shift_bounds_report(4, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn resolvent_inverts_lambda_minus_shift() {
        for m in [1, 5, 33] {
            for z in [c(0.5, 0.0), c(0.0, 1.0), c(-1.3, 0.7), c(2.0, -3.0)] {
                let r = shift_resolvent(m, z).unwrap();
                let lhs = make_shift(m).unwrap().scale(c(-1.0, 0.0)).shift_diagonal(z).matmul(&r);
                assert!(lhs.max_abs_diff(&CMatrix::identity(m)) <= 1e-12, "m={m} z={z}");
            }
        }
    }

    #[test]
    fn resolvent_matches_generic_solver() {
        let m = 12;
        let z = c(0.8, 0.9);
        let r = shift_resolvent(m, z).unwrap();
        let g: Vec<Complex> = (0..m)
            .map(|k| c((k as f64 * 0.37).sin(), (k as f64 * 1.1).cos()))
            .collect();
        let fast = r.matvec(&g);
        let slow = resolvent_apply(&make_shift(m).unwrap(), z, &g).unwrap();
        let err: f64 = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let size: f64 = slow.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * size);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(shift_exp(3, 0.0).unwrap(), CMatrix::identity(3));
        assert_eq!(
            shift_exp(3, 1.0).unwrap(),
            CMatrix::from_real_rows(&[vec![1.0, 1.0, 0.5], vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0]])
        );
        let e = shift_exp(4, 2.0).unwrap();
        assert!((e[(0, 3)].re - 4.0 / 3.0).abs() < 1e-15);
        assert!(shift_exp(0, 1.0).is_err());
    }

    #[test]
    fn exp_matches_generic_expm() {
        for m in [2, 7, 16] {
            let e = shift_exp(m, 1.7).unwrap();
            let g = expm(&make_shift(m).unwrap(), 1.7).unwrap();
            assert!(e.max_abs_diff(&g) <= 1e-13 * e.max_abs());
        }
    }

    #[test]
    fn bounds_report_examples() {
        let unit = Complex::from_polar(1.0, std::f64::consts::PI / 3.0);
        let r = shift_bounds_report(16, unit).unwrap();
        assert_eq!(r.lower, Some(4.0));
        assert!(r.norm >= 4.0 && !r.violation);

        let r = shift_bounds_report(10, c(3.0, 0.0)).unwrap();
        assert_eq!(r.upper, Some(0.5));
        assert!(r.norm <= 0.5 && r.lower.is_none() && !r.violation);

        let r = shift_bounds_report(2, c(1.0, 0.0)).unwrap();
        assert!((r.norm - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }
}
