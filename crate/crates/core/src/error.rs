// SPDX-License-Identifier: Apache-2.0

use crate::numlin::Complex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lambda in or near spectrum (condition estimate {condition:e})")]
    NearSpectrum { condition: f64 },

    #[error("0 is the spectrum of C_M")]
    ZeroInShiftSpectrum,

    #[error("lambda in sigma(B_M): lambda = {lambda} lies within {distance:e} of {point}")]
    InBlockSpectrum {
        lambda: Complex,
        point: Complex,
        distance: f64,
    },

    #[error(
        "QR iteration did not converge after {iterations} iterations; \
         active window diagonal {diagonal:?}, subdiagonal {subdiagonal:?}"
    )]
    NoConvergence {
        iterations: usize,
        diagonal: Vec<Complex>,
        subdiagonal: Vec<Complex>,
    },

    #[error("generator is not metzler: off-diagonal entry ({row}, {col}) = {value}")]
    NotMetzler { row: usize, col: usize, value: Complex },

    #[error("lambda too close to spectral bound: Re lambda - s(A) = {gap} < {required}")]
    TooCloseToSpectralBound { gap: f64, required: f64 },

    #[error("spectral bound {0} is not below the required stability margin")]
    NotStable(f64),

    #[error("norm overflow at t = {t}: log norm {log_norm} exceeds 700, rescale the generator or shorten t_max")]
    NormOverflow { t: f64, log_norm: f64 },

    #[error("quadrature grid too coarse: error estimate {estimate:e} exceeds 1% of {value:e}; try at least {suggested} points")]
    QuadratureTooCoarse {
        estimate: f64,
        value: f64,
        suggested: usize,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
