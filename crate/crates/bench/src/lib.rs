// SPDX-License-Identifier: Apache-2.0

//! Benchmark inputs shared by the criterion targets.

use dichotomy_core::{CMatrix, Complex};

/// Dense complex matrix with deterministic, well-spread entries.
pub fn dense_fixture(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let x = (i * 7 + j * 13) as f64;
        Complex::new((x * 0.37).sin(), (x * 0.11).cos()) / (n as f64).sqrt()
    })
}
