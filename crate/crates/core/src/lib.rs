// SPDX-License-Identifier: Apache-2.0

//! Numerical toolkit for a positive semigroup whose generator has no
//! spectrum on the line `Re λ = 1` while its resolvent is unbounded there.
//!
//! The operator is assembled from nilpotent shift blocks `C_M`, lifted to
//! `B_M = A_M ⊗ I + I ⊗ C_M` through an exact Fourier-mode decomposition and
//! summed into `D = ⊕ B_M`. Every resolvent norm reported here carries a
//! certification flag derived from closed-form tail bounds.
//!
//! Alongside the counterexample the crate checks the finite-dimensional
//! inequalities behind stability of positive semigroups on `L_p`: the
//! Laplace representation of the resolvent, the hyperbolicity constant for
//! periodic forcing, a lattice p-sum inequality for positive matrices and
//! the integral Minkowski inequality.

// `!(x >= 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod directsum;
pub mod dynamics;
mod error;
pub mod io;
pub mod lattice;
pub mod modeop;
pub mod numlin;
pub mod quadrature;
pub mod shiftblock;

pub use directsum::{DirectSumOperator, ScanRow, ScanTable, SkippedPoint};
pub use dynamics::{GeneratorSpec, GrowthEstimate, PositivityClass};
pub use error::{Error, Result};
pub use io::StepFunction;
pub use lattice::{InequalityReport, VectorFamily};
pub use modeop::{Attained, ModeOperator, ResolventReport};
pub use numlin::{CMatrix, Complex, NonnegMatrix};
pub use shiftblock::{ShiftBlock, ShiftBoundsReport};
