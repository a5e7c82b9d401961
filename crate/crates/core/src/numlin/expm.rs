// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential.
//!
//! Strictly triangular input is nilpotent, so its Taylor series terminates
//! and is summed exactly. Triangular input with a constant diagonal `d` is
//! handled as `e^{d}·e^{N}` with `N` nilpotent. Everything else goes through
//! scaling and squaring with a degree-16 Taylor polynomial, scaling until
//! the 1-norm is at most 1/2.

use super::{CMatrix, Complex};
use crate::error::Result;

const TAYLOR_DEGREE: usize = 16;
const SCALED_NORM: f64 = 0.5;

/// `e^{tA}`
pub fn expm(a: &CMatrix, t: f64) -> Result<CMatrix> {
    let n = a.require_square()?;
    let at = a.scale(Complex::new(t, 0.0));
    if n == 0 {
        return Ok(at);
    }
    if let Some(d) = constant_triangular_diagonal(&at) {
        let nilpotent = at.shift_diagonal(-d);
        return Ok(nilpotent_exp(&nilpotent).scale(d.exp()));
    }
    Ok(scaling_and_squaring(&at))
}

fn constant_triangular_diagonal(a: &CMatrix) -> Option<Complex> {
    if !(a.is_upper_triangular() || a.is_lower_triangular()) {
        return None;
    }
    let d = a[(0, 0)];
    (0..a.rows()).all(|i| a[(i, i)] == d).then_some(d)
}

/// Finite Taylor sum for a nilpotent matrix; `N^n = 0` for `n = dim`.
fn nilpotent_exp(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..n {
        term = term.matmul(a).scale(Complex::new(1.0 / k as f64, 0.0));
        if term.max_abs() == 0.0 {
            break;
        }
        sum = sum.add(&term);
    }
    sum
}

fn scaling_and_squaring(a: &CMatrix) -> CMatrix {
    let norm = a.norm1();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(Complex::new(2f64.powi(-squarings), 0.0));
    let n = a.rows();
    // Horner: I + B(I + B/2(I + B/3(... (I + B/16))))
    let mut acc = CMatrix::identity(n);
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = CMatrix::identity(n).add(&b.matmul(&acc).scale(Complex::new(1.0 / k as f64, 0.0)));
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}
