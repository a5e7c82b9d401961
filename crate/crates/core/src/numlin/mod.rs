// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here is a pure function of its inputs. Iterative routines use
//! fixed start vectors, so results are bitwise reproducible.

// Index loops mirror the textbook recurrences.
#![allow(clippy::needless_range_loop)]

mod eigen;
mod expm;
mod matrix;
mod norm;
mod pnorm;
mod solve;

pub use eigen::{eigenvalues, spectral_bound, MAX_EIGEN_DIM};
pub use expm::expm;
pub use matrix::{CMatrix, Complex};
pub use norm::{op_norm2, top_singular, SingularPair};
pub use pnorm::{pnorm_nonneg, NonnegMatrix};
pub use solve::{inverse, resolvent_apply, resolvent_matrix, Lu, CONDITION_LIMIT};

/// `Σ conj(a_i) b_i`
pub(crate) fn dot(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm2(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
