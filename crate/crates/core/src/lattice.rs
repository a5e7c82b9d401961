// SPDX-License-Identifier: Apache-2.0

//! Finite-lattice inequalities for positive matrices.
//!
//! On `ℂ^d` with the componentwise order, a positive operator `P` satisfies
//! `(Σ_k |P f_k|^p)^{1/p} ≤ P (Σ_k |f_k|^p)^{1/p}` componentwise. The right
//! side dominates because the p-sum is the least upper bound of
//! `Σ_k Re(a_k f_k)` over tuples with `Σ|a_k|^q ≤ 1`, and `P` preserves
//! upper bounds. Also here: the integral Minkowski inequality on weighted
//! grids, and seeded randomized suites for both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{CMatrix, Complex, NonnegMatrix};

/// Normalized margins below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-10;

pub const KRIVINE_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 10.0];
pub const MINKOWSKI_EXPONENTS: [f64; 4] = [1.0, 2.0, 3.0, 7.0];

/// Vectors `f_1..f_k` in `ℂ^d` with an exponent `p ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFamily {
    vectors: Vec<Vec<Complex>>,
    p: f64,
}

impl VectorFamily {
    pub fn new(vectors: Vec<Vec<Complex>>, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")));
        }
        let d = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.is_empty() || d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(
                "family needs k >= 1 vectors of one nonzero length".into(),
            ));
        }
        Ok(VectorFamily { vectors, p })
    }

    pub fn from_real(vectors: &[Vec<f64>], p: f64) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex::new(x, 0.0)).collect())
                .collect(),
            p,
        )
    }

    pub fn vectors(&self) -> &[Vec<Complex>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent; infinite for `p = 1`.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// Componentwise `(Σ_k |f_k(j)|^p)^{1/p}`.
    pub fn pvector_norm(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| psum(self.vectors.iter().map(|f| f[j].norm()), self.p))
            .collect()
    }

    /// Dual tuple attaining the p-sum at component `j` (Hölder equality).
    pub fn holder_coefficients(&self, j: usize) -> Vec<Complex> {
        let zero = Complex::new(0.0, 0.0);
        if self.p == 1.0 {
            return self
                .vectors
                .iter()
                .map(|f| {
                    let r = f[j].norm();
                    if r == 0.0 {
                        zero
                    } else {
                        f[j].conj() / r
                    }
                })
                .collect();
        }
        let s = psum(self.vectors.iter().map(|f| f[j].norm()), self.p);
        if s == 0.0 {
            return vec![zero; self.len()];
        }
        self.vectors
            .iter()
            .map(|f| {
                let r = f[j].norm();
                if r == 0.0 {
                    zero
                } else {
                    f[j].conj() * r.powf(self.p - 2.0) / s.powf(self.p - 1.0)
                }
            })
            .collect()
    }

    fn dual_value(&self, a: &[Complex], j: usize) -> f64 {
        a.iter().zip(&self.vectors).map(|(ak, f)| (ak * f[j]).re).sum()
    }

    fn map(&self, p_mat: &NonnegMatrix) -> VectorFamily {
        VectorFamily {
            vectors: self.vectors.iter().map(|f| p_mat.as_cmatrix().matvec(f)).collect(),
            p: self.p,
        }
    }
}

/// `(Σ x_i^p)^{1/p}` scaled by the largest term to avoid overflow.
fn psum(xs: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let top = xs.clone().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    top * xs.map(|x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn pvector_norm(fam: &VectorFamily) -> Vec<f64> {
    fam.pvector_norm()
}

/// `min_j [P (Σ|f_k|^p)^{1/p} - (Σ|P f_k|^p)^{1/p}]_j`
pub fn krivine_margin(p_mat: &NonnegMatrix, fam: &VectorFamily) -> Result<f64> {
    if p_mat.dim() != fam.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} applied to vectors of length {}",
            p_mat.dim(),
            fam.dim()
        )));
    }
    let rhs = p_mat.apply(&fam.pvector_norm());
    let lhs = fam.map(p_mat).pvector_norm();
    Ok(rhs.iter().zip(&lhs).map(|(r, l)| r - l).fold(f64::INFINITY, f64::min))
}

/// Componentwise maximum of `Σ_k Re(a_k f_k)` over sampled dual tuples with
/// `‖a‖_q ≤ 1`. The Hölder-optimal tuple of every component is always among
/// the samples, followed by `samples` random tuples drawn from `seed`.
pub fn lub_dual_lower(fam: &VectorFamily, samples: usize, seed: u64) -> Vec<f64> {
    let d = fam.dim();
    let mut best = vec![f64::NEG_INFINITY; d];
    let mut consider = |a: &[Complex]| {
        for (j, b) in best.iter_mut().enumerate() {
            *b = b.max(fam.dual_value(a, j));
        }
    };
    for j in 0..d {
        consider(&fam.holder_coefficients(j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = fam.q();
    for _ in 0..samples {
        let mut a: Vec<Complex> = (0..fam.len())
            .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let len = if q.is_infinite() {
            a.iter().map(|z| z.norm()).fold(0.0, f64::max)
        } else {
            psum(a.iter().map(|z| z.norm()), q)
        };
        if len > 0.0 {
            a.iter_mut().for_each(|z| *z /= len);
            consider(&a);
        }
    }
    best
}

/// `Σ_s w_s (Σ_t w_t g(s,t)^p)^{1/p} - (Σ_t w_t (Σ_s w_s g(s,t))^p)^{1/p}`
/// for a nonnegative grid `g[s][t]`.
pub fn minkowski_margin(g: &[Vec<f64>], p: f64, ws: &[f64], wt: &[f64]) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")));
    }
    if g.len() != ws.len() || g.iter().any(|row| row.len() != wt.len()) || g.is_empty() || wt.is_empty() {
        return Err(Error::DimensionMismatch(
            "grid shape must match the weight vectors".into(),
        ));
    }
    for (s, row) in g.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            if !(v >= 0.0) {
                return Err(Error::NegativeEntry {
                    row: s,
                    col: t,
                    value: v,
                });
            }
        }
    }
    if ws.iter().chain(wt).any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidArgument("quadrature weights must be nonnegative".into()));
    }
    let lhs: f64 = g
        .iter()
        .zip(ws)
        .map(|(row, w)| {
            w * row
                .iter()
                .zip(wt)
                .map(|(v, u)| u * v.powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        })
        .sum();
    let rhs = (0..wt.len())
        .map(|t| wt[t] * g.iter().zip(ws).map(|(row, w)| w * row[t]).sum::<f64>().powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    Ok(lhs - rhs)
}

/// Inputs reproducing the worst trial of a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Krivine {
        trial: u64,
        p: f64,
        matrix: CMatrix,
        vectors: Vec<Vec<[f64; 2]>>,
        margin: f64,
    },
    Minkowski {
        trial: u64,
        p: f64,
        grid: Vec<Vec<f64>>,
        ws: Vec<f64>,
        wt: Vec<f64>,
        margin: f64,
    },
}

/// Outcome of a seeded randomized inequality suite. `worst_margin` is the
/// smallest normalized margin seen; a trial violates when it is below
/// `-1e-10`. `witness` is present exactly when some trial violated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub trials: u64,
    pub seed: u64,
    pub worst_margin: f64,
    pub violations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Largest relative gap between the dual representation at Hölder-optimal
    /// coefficients and the p-sum (lattice suite only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_max_rel_error: Option<f64>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Independent stream per trial, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Inputs of lattice-suite trial `trial`: `d ≤ 6`, `k ≤ 5`, `P` uniform on
/// `[0, 1)`, `f_k` complex Gaussian.
pub fn krivine_trial_inputs(seed: u64, trial: u64) -> (NonnegMatrix, VectorFamily) {
    let mut rng = trial_rng(seed, trial);
    let d = rng.random_range(1..=6usize);
    let k = rng.random_range(1..=5usize);
    let p = KRIVINE_EXPONENTS[rng.random_range(0..KRIVINE_EXPONENTS.len())];
    let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
    let vectors = (0..k)
        .map(|_| (0..d).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    (
        NonnegMatrix::from_rows(&rows).expect("uniform entries are nonnegative"),
        VectorFamily::new(vectors, p).expect("valid family"),
    )
}

fn krivine_scale(p_mat: &NonnegMatrix, fam: &VectorFamily) -> f64 {
    let fmax = fam
        .vectors()
        .iter()
        .map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let s = p_mat.max_column_sum() * fmax;
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Randomized check of the lattice p-sum inequality and its dual
/// representation over `trials` seeded trials.
pub fn krivine_suite(trials: u64, seed: u64) -> Result<InequalityReport> {
    let mut worst = f64::INFINITY;
    let mut worst_trial = None;
    let mut violations = 0;
    let mut dual_err = 0.0f64;
    for trial in 0..trials {
        let (p_mat, fam) = krivine_trial_inputs(seed, trial);
        let margin = krivine_margin(&p_mat, &fam)? / krivine_scale(&p_mat, &fam);
        if margin < -VIOLATION_TOL {
            violations += 1;
        }
        if margin < worst {
            worst = margin;
            worst_trial = Some((trial, p_mat.clone(), fam.clone(), margin));
        }
        let exact = fam.pvector_norm();
        let dual = lub_dual_lower(&fam, 0, seed);
        for (e, l) in exact.iter().zip(&dual) {
            let rel = if *e > 0.0 { (e - l).abs() / e } else { l.abs() };
            dual_err = dual_err.max(rel);
        }
    }
    let witness = (violations > 0).then(|| {
        let (trial, p_mat, fam, margin) = worst_trial.expect("violations imply a worst trial");
        Witness::Krivine {
            trial,
            p: fam.p(),
            matrix: p_mat.into_cmatrix(),
            vectors: fam
                .vectors()
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            margin,
        }
    });
    Ok(InequalityReport {
        trials,
        seed,
        worst_margin: worst,
        violations,
        witness,
        dual_max_rel_error: Some(dual_err),
    })
}

/// Inputs of Minkowski-suite trial `trial`: grid up to 32×32 with entries
/// uniform on `[0, 1)`, trapezoid weights in `s` and random positive weights
/// in `t`.
pub fn minkowski_trial_inputs(seed: u64, trial: u64) -> (Vec<Vec<f64>>, f64, Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, trial);
    let ns = rng.random_range(1..=32usize);
    let nt = rng.random_range(1..=32usize);
    let p = MINKOWSKI_EXPONENTS[rng.random_range(0..MINKOWSKI_EXPONENTS.len())];
    let g = (0..ns)
        .map(|_| (0..nt).map(|_| rng.random::<f64>()).collect())
        .collect();
    let h = 1.0 / ns as f64;
    let ws = (0..ns)
        .map(|i| if ns > 1 && (i == 0 || i + 1 == ns) { 0.5 * h } else { h })
        .collect();
    let wt = (0..nt).map(|_| rng.random_range(0.01..1.0)).collect();
    (g, p, ws, wt)
}

pub fn minkowski_suite(trials: u64, seed: u64) -> Result<InequalityReport> {
    let mut worst = f64::INFINITY;
    let mut worst_trial = None;
    let mut violations = 0;
    for trial in 0..trials {
        let (g, p, ws, wt) = minkowski_trial_inputs(seed, trial);
        let margin = minkowski_margin(&g, p, &ws, &wt)?;
        let rhs_scale =
            g.iter().flatten().fold(0.0f64, |a, &b| a.max(b)) * ws.iter().sum::<f64>() * wt.iter().sum::<f64>();
        let margin = margin / rhs_scale.max(1.0);
        if margin < -VIOLATION_TOL {
            violations += 1;
        }
        if margin < worst {
            worst = margin;
            worst_trial = Some((trial, g, p, ws, wt, margin));
        }
    }
    let witness = (violations > 0).then(|| {
        let (trial, grid, p, ws, wt, margin) = worst_trial.expect("violations imply a worst trial");
        Witness::Minkowski {
            trial,
            p,
            grid,
            ws,
            wt,
            margin,
        }
    });
    Ok(InequalityReport {
        trials,
        seed,
        worst_margin: worst,
        violations,
        witness,
        dual_max_rel_error: None,
    })
}
