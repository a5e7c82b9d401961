// SPDX-License-Identifier: Apache-2.0

//! Semigroup-level checks for finite generators: spectral versus growth
//! bound, the Laplace representation of the resolvent, the convolution
//! inequality for positive stable semigroups, and the hyperbolicity
//! constant for periodic forcing.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::StepFunction;
use crate::lattice::trial_rng;
use crate::numlin::{
    eigenvalues, expm, inverse, norm2, op_norm2, pnorm_nonneg, resolvent_apply, resolvent_matrix, spectral_bound,
    top_singular, CMatrix, Complex, NonnegMatrix,
};
use crate::quadrature::{periodic, romberg, trapezoid, Estimate};

/// Required gap `Re λ - s(A)` for the Laplace representation.
pub const LAPLACE_MIN_GAP: f64 = 0.1;
/// Truncation target `e^{(s(A) - Re λ) T}` for the Laplace horizon.
pub const LAPLACE_TAIL: f64 = 1e-10;
pub const LAPLACE_MIN_PANELS: usize = 4096;
/// Required `s(A)` ceiling for the convolution inequality.
pub const CONVOLUTION_STABILITY: f64 = -0.05;
/// Eigenvalues closer than this to `ik` block the hyperbolicity constant.
pub const AXIS_CLEARANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityClass {
    /// Real with nonnegative off-diagonal entries, so `e^{tA} ≥ 0`.
    #[serde(rename = "metzler-positive-semigroup")]
    MetzlerPositive,
    #[serde(rename = "general")]
    General,
}

/// A square generator together with its verified positivity class.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    a: CMatrix,
    class: PositivityClass,
}

fn metzler_violation(a: &CMatrix) -> Option<(usize, usize, Complex)> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            if z.im != 0.0 || (i != j && z.re < 0.0) {
                return Some((i, j, z));
            }
        }
    }
    None
}

impl GeneratorSpec {
    /// Classifies `a` automatically.
    pub fn new(a: CMatrix) -> Result<Self> {
        let n = a.require_square()?;
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let class = if metzler_violation(&a).is_none() {
            PositivityClass::MetzlerPositive
        } else {
            PositivityClass::General
        };
        Ok(GeneratorSpec { a, class })
    }

    /// Fails unless `a` is metzler.
    pub fn metzler(a: CMatrix) -> Result<Self> {
        let spec = Self::new(a)?;
        spec.require_metzler()?;
        Ok(spec)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn class(&self) -> PositivityClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn spectral_bound(&self) -> Result<f64> {
        spectral_bound(&self.a)
    }

    /// `A - σI`; rescales the semigroup by `e^{-σt}` and keeps the class.
    pub fn shifted(&self, sigma: f64) -> GeneratorSpec {
        GeneratorSpec {
            a: self.a.shift_diagonal(Complex::new(-sigma, 0.0)),
            class: self.class,
        }
    }

    fn require_metzler(&self) -> Result<()> {
        match metzler_violation(&self.a) {
            None => Ok(()),
            Some((row, col, value)) => Err(Error::NotMetzler { row, col, value }),
        }
    }
}

/// Samples of `log‖e^{tA}‖` with the tail slope and the spectral bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub samples: Vec<(f64, f64)>,
    pub omega_hat: f64,
    pub s_value: f64,
    pub t_max: f64,
}

impl GrowthEstimate {
    /// `max(0.05, 10/t_max)`
    pub fn tolerance(&self) -> f64 {
        0.05f64.max(10.0 / self.t_max)
    }

    pub fn gap(&self) -> f64 {
        (self.omega_hat - self.s_value).abs()
    }
}

/// Least-squares slope of `log‖e^{tA}‖` over the upper half of
/// `t_i = t_max·i/n`, `i = 1..=n`.
pub fn growth_estimate(spec: &GeneratorSpec, t_max: f64, n_samples: usize) -> Result<GrowthEstimate> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    if n_samples < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 samples, got {n_samples}"
        )));
    }
    let mut samples = Vec::with_capacity(n_samples);
    for i in 1..=n_samples {
        let t = t_max * i as f64 / n_samples as f64;
        let e = expm(spec.matrix(), t)?;
        if !e.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NormOverflow {
                t,
                log_norm: f64::INFINITY,
            });
        }
        let log_norm = op_norm2(&e)?.ln();
        if !(log_norm <= 700.0) {
            return Err(Error::NormOverflow { t, log_norm });
        }
        if !log_norm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "norm of e^(tA) underflowed at t = {t}; shift the generator"
            )));
        }
        samples.push((t, log_norm));
    }
    let tail = &samples[n_samples / 2..];
    let m = tail.len() as f64;
    let tbar = tail.iter().map(|s| s.0).sum::<f64>() / m;
    let ybar = tail.iter().map(|s| s.1).sum::<f64>() / m;
    let sxy: f64 = tail.iter().map(|s| (s.0 - tbar) * (s.1 - ybar)).sum();
    let sxx: f64 = tail.iter().map(|s| (s.0 - tbar).powi(2)).sum();
    Ok(GrowthEstimate {
        samples,
        omega_hat: sxy / sxx,
        s_value: spec.spectral_bound()?,
        t_max,
    })
}

/// Quadrature of `∫_0^T e^{s(A-λ)} g ds` against `(λ - A)^{-1} g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub rel_error: f64,
    /// Romberg error estimate relative to the resolvent value.
    pub quad_error: f64,
    pub horizon: f64,
    pub panels: usize,
    pub spectral_bound: f64,
}

/// Compares the truncated Laplace integral with the resolvent.
///
/// The horizon defaults to the `T` with `e^{(s(A) - Re λ)T} = 1e-10`. The
/// integrand is sampled exactly through the one-step propagator
/// `e^{h(A-λ)}` and integrated by Romberg extrapolation of the trapezoid
/// rule. At least `steps` (and never fewer than 4096) panels are used, more
/// if needed to keep `h‖A - λ‖₁ ≤ 1/4`.
pub fn laplace_check(
    spec: &GeneratorSpec,
    lambda: Complex,
    g: &[f64],
    horizon: Option<f64>,
    steps: usize,
) -> Result<LaplaceCheck> {
    spec.require_metzler()?;
    if g.len() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "g has length {}, generator has dimension {}",
            g.len(),
            spec.dim()
        )));
    }
    if let Some((i, &v)) = g.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeEntry {
            row: i,
            col: 0,
            value: v,
        });
    }
    let s = spec.spectral_bound()?;
    let gap = lambda.re - s;
    // inclusive boundary; `s + 0.1` may round just below it
    if !(gap >= LAPLACE_MIN_GAP * (1.0 - 1e-12)) {
        return Err(Error::TooCloseToSpectralBound {
            gap,
            required: LAPLACE_MIN_GAP,
        });
    }
    let auto_horizon = -LAPLACE_TAIL.ln() / gap;
    let horizon = match horizon {
        None => auto_horizon,
        Some(t) if t >= auto_horizon * (1.0 - 1e-12) => t,
        Some(t) => {
            return Err(Error::InvalidArgument(format!(
                "horizon {t} leaves a tail above {LAPLACE_TAIL}; need at least {auto_horizon}"
            )))
        }
    };
    let shifted = spec.matrix().shift_diagonal(-lambda);
    let needed = (horizon * shifted.norm1() / 0.25).ceil() as usize;
    let panels = steps.max(LAPLACE_MIN_PANELS).max(needed).div_ceil(64) * 64;
    let h = horizon / panels as f64;
    let step = expm(&shifted, h)?;
    let mut samples = Vec::with_capacity(panels + 1);
    let mut y: Vec<Complex> = g.iter().map(|&v| Complex::new(v, 0.0)).collect();
    for _ in 0..panels {
        let next = step.matvec(&y);
        samples.push(y);
        y = next;
    }
    samples.push(y);
    let (value, err) = romberg(&samples, h, 6);
    let g_c: Vec<Complex> = g.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let reference = resolvent_apply(spec.matrix(), lambda, &g_c)?;
    let ref_norm = norm2(&reference);
    let diff: Vec<Complex> = value.iter().zip(&reference).map(|(a, b)| a - b).collect();
    let scale = if ref_norm > 0.0 { ref_norm } else { 1.0 };
    Ok(LaplaceCheck {
        rel_error: norm2(&diff) / scale,
        quad_error: err / scale,
        horizon,
        panels,
        spectral_bound: s,
    })
}

/// Both sides of the convolution inequality
/// `(∫_0^{2π} ‖∫_0^N e^{sA} f(t-s) ds‖_p^p dt)^{1/p} ≤ ‖A^{-1}‖_p (∫_0^{2π} ‖f‖_p^p dt)^{1/p}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub margin: f64,
    /// Bound on the quadrature error carried by `lhs`.
    pub tol_quad: f64,
    pub inverse_norm: f64,
    pub p: f64,
    pub horizon: f64,
}

impl ConvolutionReport {
    pub fn holds(&self) -> bool {
        self.margin >= -self.tol_quad
    }
}

/// `‖A^{-1}‖_p` for a metzler-stable `A` through the nonnegative `-A^{-1}`.
pub fn inverse_pnorm(spec: &GeneratorSpec, p: f64) -> Result<f64> {
    let inv = inverse(spec.matrix())?;
    let n = spec.dim();
    let scale = inv.max_abs();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, r) in row.iter_mut().enumerate() {
            let v = -inv[(i, j)];
            if v.im.abs() > 1e-12 * scale || v.re < -1e-12 * scale {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value: v.re,
                });
            }
            *r = v.re.max(0.0);
        }
    }
    pnorm_nonneg(&NonnegMatrix::from_rows(&rows)?, p)
}

/// Evaluates the convolution inequality for a step function `f`.
///
/// The inner integral is exact: on every `s`-interval where `f(t - s)` is a
/// constant `v`, `∫_a^b e^{sA} v ds = A^{-1}(e^{bA} - e^{aA}) v`. The outer
/// integral uses the trapezoid rule with `panels` panels on each interval
/// between the breaks of `f` and their translates by `N` (where the inner
/// integral has kinks), with a Richardson error estimate.
pub fn convolution_margin(
    spec: &GeneratorSpec,
    f: &StepFunction,
    horizon: f64,
    p: f64,
    panels: usize,
) -> Result<ConvolutionReport> {
    spec.require_metzler()?;
    let s = spec.spectral_bound()?;
    if !(s < CONVOLUTION_STABILITY) {
        return Err(Error::NotStable(s));
    }
    if f.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "step function has dimension {}, generator {}",
            f.dim(),
            spec.dim()
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if panels < 2 || panels % 2 != 0 {
        return Err(Error::InvalidArgument("panels must be even and at least 2".into()));
    }
    let inverse_norm = inverse_pnorm(spec, p)?;
    let breaks = f.breaks();
    let f_integral: f64 = breaks
        .windows(2)
        .zip(f.values())
        .map(|(w, v)| (w[1] - w[0]) * v.iter().map(|x| x.abs().powf(p)).sum::<f64>())
        .sum();
    let rhs = inverse_norm * f_integral.powf(1.0 / p);

    let kernel = ConvolutionKernel::new(spec, f, horizon)?;
    let mut nodes: Vec<f64> = breaks.to_vec();
    nodes.extend(breaks.iter().map(|b| (b + horizon).rem_euclid(TAU)));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut integral = 0.0;
    let mut err = 0.0;
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        let samples: Vec<f64> = (0..=panels)
            .map(|i| {
                let t = w[0] + h * i as f64;
                kernel.eval(t).map(|u| u.iter().map(|x| x.norm().powf(p)).sum::<f64>())
            })
            .collect::<Result<_>>()?;
        let Estimate { value, error } = trapezoid(&samples, h);
        integral += value;
        err += error;
    }
    let lhs = integral.max(0.0).powf(1.0 / p);
    let tol_quad = (integral + err).max(0.0).powf(1.0 / p) - lhs + 1e-12 * rhs.max(lhs);
    Ok(ConvolutionReport {
        lhs,
        rhs,
        margin: rhs - lhs,
        tol_quad,
        inverse_norm,
        p,
        horizon,
    })
}

/// `t ↦ ∫_0^N e^{sA} f(t - s) ds` for a periodic step function.
struct ConvolutionKernel<'a> {
    a: &'a CMatrix,
    a_inv: CMatrix,
    f: &'a StepFunction,
    horizon: f64,
}

impl<'a> ConvolutionKernel<'a> {
    fn new(spec: &'a GeneratorSpec, f: &'a StepFunction, horizon: f64) -> Result<Self> {
        Ok(ConvolutionKernel {
            a: spec.matrix(),
            a_inv: inverse(spec.matrix())?,
            f,
            horizon,
        })
    }

    fn eval(&self, t: f64) -> Result<Vec<Complex>> {
        let d = self.a.rows();
        let mut acc = vec![Complex::new(0.0, 0.0); d];
        // r = t - s runs over [t - N, t]; walk the pieces of f backwards from t
        let breaks = self.f.breaks();
        let period = (t / TAU).floor();
        let mut base = period * TAU;
        let local = t - base;
        let mut piece = breaks[1..].partition_point(|&b| b <= local).min(self.f.pieces() - 1);
        let mut s_lo = 0.0f64;
        while s_lo < self.horizon {
            let start = base + breaks[piece];
            let s_hi = (t - start).min(self.horizon);
            if s_hi > s_lo {
                let v: Vec<Complex> = self.f.values()[piece].iter().map(|&x| Complex::new(x, 0.0)).collect();
                let e_hi = expm(self.a, s_hi)?;
                let e_lo = expm(self.a, s_lo)?;
                let diff = e_hi.sub(&e_lo).matvec(&v);
                for (o, x) in acc.iter_mut().zip(&diff) {
                    *o += x;
                }
            }
            s_lo = s_lo.max(s_hi);
            if piece == 0 {
                piece = self.f.pieces() - 1;
                base -= TAU;
            } else {
                piece -= 1;
            }
        }
        Ok(self.a_inv.matvec(&acc))
    }
}

/// Lower and exact values of the constant in the periodic-forcing estimate
/// `∫‖Σ (ik - A)^{-1} v_k e^{ikt}‖_p^p dt ≤ c^p ∫‖Σ v_k e^{ikt}‖_p^p dt`,
/// `|k| ≤ n_modes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub spectrum_clear: bool,
    pub c_lower: Option<f64>,
    /// `max_k ‖(ik - A)^{-1}‖₂`, reported for `p = 2` where Parseval makes it exact.
    pub c_exact_p2: Option<f64>,
    pub maximizing_mode: Option<i64>,
    /// Largest relative quadrature error estimate over the evaluated ratios.
    pub quad_error: f64,
    pub n_modes: usize,
    pub p: f64,
    pub quad_points: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Estimates the hyperbolicity constant.
///
/// `c_lower` is the largest ratio over `trials` seeded complex-Gaussian
/// families plus one deterministic family concentrated on the mode with the
/// largest resolvent norm along its top right singular vector. Integrals
/// use the periodic rule on `quad` points.
pub fn hyperbolicity_constant(
    spec: &GeneratorSpec,
    n_modes: usize,
    p: f64,
    quad: usize,
    trials: u64,
    seed: u64,
) -> Result<HyperbolicityReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")));
    }
    if quad < 4 || quad % 2 != 0 {
        return Err(Error::InvalidArgument(
            "quad must be an even number of points, at least 4".into(),
        ));
    }
    let mut report = HyperbolicityReport {
        spectrum_clear: false,
        c_lower: None,
        c_exact_p2: None,
        maximizing_mode: None,
        quad_error: 0.0,
        n_modes,
        p,
        quad_points: quad,
        trials,
        seed,
    };
    let n = n_modes as i64;
    let eig = eigenvalues(spec.matrix())?;
    let blocked = eig.iter().any(|z| {
        let k = z.im.round();
        k.abs() <= n as f64 && (z - Complex::new(0.0, k)).norm() < AXIS_CLEARANCE
    });
    if blocked {
        return Ok(report);
    }
    let mut resolvents = Vec::with_capacity(2 * n_modes + 1);
    for k in -n..=n {
        match resolvent_matrix(spec.matrix(), Complex::new(0.0, k as f64)) {
            Ok(r) => resolvents.push(r),
            Err(Error::NearSpectrum { .. }) => return Ok(report),
            Err(e) => return Err(e),
        }
    }
    report.spectrum_clear = true;

    let mut top = (f64::NEG_INFINITY, 0i64, Vec::new());
    for (idx, r) in resolvents.iter().enumerate() {
        let pair = top_singular(r)?;
        let k = idx as i64 - n;
        if pair.value > top.0 || (pair.value == top.0 && k.abs() < top.1.abs()) {
            top = (pair.value, k, pair.right);
        }
    }
    if p == 2.0 {
        report.c_exact_p2 = Some(top.0);
    }
    report.maximizing_mode = Some(top.1);

    let d = spec.dim();
    let zero = vec![Complex::new(0.0, 0.0); d];
    let mut families: Vec<Vec<Vec<Complex>>> = Vec::with_capacity(trials as usize + 1);
    let mut injected = vec![zero.clone(); 2 * n_modes + 1];
    injected[(top.1 + n) as usize] = top.2.clone();
    families.push(injected);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        families.push((0..=2 * n).map(|_| gaussian_vector(&mut rng, d)).collect());
    }

    let mut best = 0.0f64;
    let mut worst_err = 0.0f64;
    for v in &families {
        let mapped: Vec<Vec<Complex>> = resolvents.iter().zip(v).map(|(r, vk)| r.matvec(vk)).collect();
        let num = trig_integral(&mapped, n, quad, p);
        let den = trig_integral(v, n, quad, p);
        if den.value == 0.0 {
            continue;
        }
        let ratio = (num.value / den.value).powf(1.0 / p);
        let rel = (num.error / num.value.max(f64::MIN_POSITIVE) + den.error / den.value) / p;
        if rel > 0.01 {
            return Err(Error::QuadratureTooCoarse {
                estimate: rel * ratio,
                value: ratio,
                suggested: 2 * quad,
            });
        }
        worst_err = worst_err.max(rel);
        best = best.max(ratio);
    }
    report.c_lower = Some(best);
    report.quad_error = worst_err;
    Ok(report)
}

/// `∫_0^{2π} ‖Σ_{k=-n}^{n} w_k e^{ikt}‖_p^p dt` by the periodic rule.
fn trig_integral(w: &[Vec<Complex>], n: i64, points: usize, p: f64) -> Estimate {
    let samples: Vec<f64> = (0..points)
        .map(|j| {
            let t = TAU * j as f64 / points as f64;
            let d = w[0].len();
            let mut acc = vec![Complex::new(0.0, 0.0); d];
            for (idx, wk) in w.iter().enumerate() {
                let k = idx as i64 - n;
                let phase = Complex::from_polar(1.0, k as f64 * t);
                for (a, x) in acc.iter_mut().zip(wk) {
                    *a += x * phase;
                }
            }
            acc.iter().map(|z| z.norm().powf(p)).sum()
        })
        .collect();
    periodic(&samples)
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex> {
    (0..d)
        .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// `P - (ρ(P) + margin)·I` for `P` uniform on `[0, 1)^{d×d}`; metzler with
/// spectral bound `-margin`.
pub fn random_metzler_stable(rng: &mut ChaCha8Rng, d: usize, margin: f64) -> Result<GeneratorSpec> {
    let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
    let p_mat = CMatrix::from_real_rows(&rows);
    let rho = spectral_bound(&p_mat)?;
    GeneratorSpec::metzler(p_mat.shift_diagonal(Complex::new(-(rho + margin), 0.0)))
}

/// Real Gaussian matrix with entries of variance `1/d`.
pub fn random_gaussian(rng: &mut ChaCha8Rng, d: usize) -> Result<GeneratorSpec> {
    let sd = 1.0 / (d as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    GeneratorSpec::new(CMatrix::from_real_rows(&rows))
}

/// Outcome of a seeded suite of semigroup checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub trials: u64,
    pub seed: u64,
    /// Worst value of the suite statistic (largest error, or smallest
    /// margin in units of its tolerance).
    pub worst: f64,
    pub failures: u64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Spectral abscissae probed by the Laplace suite, relative to `s(A)`.
pub const LAPLACE_GRID_RE: [f64; 3] = [0.1, 0.5, 1.5];
pub const LAPLACE_GRID_IM: [f64; 3] = [0.0, 1.5, -3.0];
pub const LAPLACE_TOL: f64 = 1e-6;

/// Laplace representation on `A = P - (ρ(P) + 1)I`, `d ≤ 6`, over the
/// `λ` grid above; reports the largest relative error.
pub fn laplace_suite(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let d = rng.random_range(1..=6usize);
        let spec = random_metzler_stable(&mut rng, d, 1.0)?;
        let g: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let s = spec.spectral_bound()?;
        let mut trial_failed = false;
        for re in LAPLACE_GRID_RE {
            for im in LAPLACE_GRID_IM {
                let check = laplace_check(&spec, Complex::new(s + re, im), &g, None, LAPLACE_MIN_PANELS)?;
                worst = worst.max(check.rel_error);
                trial_failed |= !(check.rel_error <= LAPLACE_TOL);
            }
        }
        failures += trial_failed as u64;
    }
    Ok(SuiteReport {
        trials,
        seed,
        worst,
        failures,
        tolerance: LAPLACE_TOL,
    })
}

pub const CONVOLUTION_EXPONENTS: [f64; 3] = [1.0, 2.0, 3.0];

/// Inputs for convolution trial `trial`: metzler `A` with `d ≤ 4` and
/// `s(A) ∈ [-1, -0.1]`, an 8-step `f` with Gaussian values, horizon in
/// `[1, 20]` and `p` cycling through 1, 2, 3.
pub fn convolution_trial_inputs(seed: u64, trial: u64) -> Result<(GeneratorSpec, StepFunction, f64, f64)> {
    let mut rng = trial_rng(seed, trial);
    let d = rng.random_range(1..=4usize);
    let margin = rng.random_range(0.1..=1.0);
    let spec = random_metzler_stable(&mut rng, d, margin)?;
    let mut cuts: Vec<f64> = (0..7).map(|_| rng.random_range(0.0..TAU)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut breaks = vec![0.0];
    breaks.extend(cuts);
    breaks.push(TAU);
    breaks.dedup();
    let values = (0..breaks.len() - 1)
        .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let f = StepFunction::new(breaks, values)?;
    let horizon = rng.random_range(1.0..=20.0);
    let p = CONVOLUTION_EXPONENTS[(trial % 3) as usize];
    Ok((spec, f, horizon, p))
}

/// Convolution inequality over seeded trials; `worst` is the smallest
/// `margin + tol_quad`.
pub fn convolution_suite(trials: u64, seed: u64, panels: usize) -> Result<SuiteReport> {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for trial in 0..trials {
        let (spec, f, horizon, p) = convolution_trial_inputs(seed, trial)?;
        let r = convolution_margin(&spec, &f, horizon, p, panels)?;
        worst = worst.min(r.margin + r.tol_quad);
        failures += !r.holds() as u64;
    }
    Ok(SuiteReport {
        trials,
        seed,
        worst,
        failures,
        tolerance: 0.0,
    })
}

pub const HYPERBOLICITY_MODES: usize = 32;
/// Random families per hyperbolicity trial, besides the injected one.
pub const HYPERBOLICITY_FAMILIES: u64 = 16;

/// Periodic-rule size that integrates the `p = 2` integrand exactly at both
/// levels of the error estimate.
pub fn default_quad_points(n_modes: usize) -> usize {
    8 * n_modes.max(1)
}

/// Real Gaussian generator with `d ≤ 6` for hyperbolicity trial `trial`.
pub fn hyperbolicity_trial_inputs(seed: u64, trial: u64) -> Result<GeneratorSpec> {
    let mut rng = trial_rng(seed, trial);
    let d = rng.random_range(1..=6usize);
    random_gaussian(&mut rng, d)
}

/// `p = 2` hyperbolicity constant over seeded generators; `worst` is the
/// smallest `c_lower / c_exact_p2`, and a trial fails outside
/// `[0.98, 1 + 1e-8]` or when the imaginary axis is not clear.
pub fn hyperbolicity_suite(trials: u64, seed: u64, n_modes: usize, families: u64) -> Result<SuiteReport> {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for trial in 0..trials {
        let spec = hyperbolicity_trial_inputs(seed, trial)?;
        let r = hyperbolicity_constant(
            &spec,
            n_modes,
            2.0,
            default_quad_points(n_modes),
            families,
            seed.wrapping_add(trial),
        )?;
        match (r.c_lower, r.c_exact_p2) {
            (Some(lo), Some(exact)) => {
                let ratio = lo / exact;
                worst = worst.min(ratio);
                failures += !(0.98..=1.0 + 1e-8).contains(&ratio) as u64;
            }
            _ => failures += 1,
        }
    }
    Ok(SuiteReport {
        trials,
        seed,
        worst,
        failures,
        tolerance: 0.02,
    })
}

/// Gaussian `G` with `d ≤ 8`, shifted so that `s(A) = u` for `u` uniform on
/// `[-1, 1]`; keeps `‖e^{tA}‖` representable up to `t = 200`.
pub fn growth_trial_inputs(seed: u64, trial: u64) -> Result<GeneratorSpec> {
    let mut rng = trial_rng(seed, trial);
    let d = rng.random_range(1..=8usize);
    let g = random_gaussian(&mut rng, d)?;
    let target = rng.random_range(-1.0..=1.0);
    Ok(g.shifted(g.spectral_bound()? - target))
}

pub const GROWTH_SAMPLES: usize = 64;

/// `|omega_hat - s|` over seeded generators; `worst` is the largest gap.
pub fn growth_suite(trials: u64, seed: u64, t_max: f64, samples: usize) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut tolerance = 0.0;
    for trial in 0..trials {
        let spec = growth_trial_inputs(seed, trial)?;
        let g = growth_estimate(&spec, t_max, samples)?;
        tolerance = g.tolerance();
        worst = worst.max(g.gap());
        failures += !(g.gap() <= tolerance) as u64;
    }
    Ok(SuiteReport {
        trials,
        seed,
        worst,
        failures,
        tolerance,
    })
}
