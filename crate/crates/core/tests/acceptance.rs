// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria for the toolkit. Runs as a plain binary so every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dichotomy_core::directsum::DirectSumOperator;
use dichotomy_core::dynamics::{
    self, convolution_margin, convolution_trial_inputs, growth_estimate, growth_trial_inputs, hyperbolicity_constant,
    hyperbolicity_trial_inputs, laplace_check, GeneratorSpec, LAPLACE_GRID_IM, LAPLACE_GRID_RE,
};
use dichotomy_core::lattice::{krivine_suite, krivine_trial_inputs};
use dichotomy_core::modeop::ModeOperator;
use dichotomy_core::numlin::{op_norm2, resolvent_matrix, CMatrix, Complex};
use dichotomy_core::shiftblock::{shift_bounds_report, shift_exp};
use dichotomy_core::StepFunction;

const SEED: u64 = 20_240_917;
const BLOCK_SIZES: [usize; 7] = [2, 4, 8, 16, 32, 64, 128];

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `‖(e^{iθ} - C_M)^{-1}‖`: the resolvent is unitarily similar to the
/// all-ones upper-triangular matrix, whose norm is `1/(2 sin(π/(4M+2)))`.
fn unit_circle_norm(m: usize) -> f64 {
    1.0 / (2.0 * (PI / (4 * m + 2) as f64).sin())
}

fn unit_angles() -> impl Iterator<Item = f64> {
    (0..32).map(|j| TAU * (j as f64 + 0.25) / 32.0)
}

fn criterion_1() -> Outcome {
    let mut worst = f64::INFINITY;
    for m in BLOCK_SIZES {
        let oracle = unit_circle_norm(m);
        for theta in unit_angles() {
            let r = shift_bounds_report(m, Complex::from_polar(1.0, theta)).map_err(|e| e.to_string())?;
            let sqrt_m = (m as f64).sqrt();
            check(r.norm >= sqrt_m - 1e-9 && !r.violation, || {
                format!("M={m} theta={theta}: norm {} below sqrt(M)", r.norm)
            })?;
            check((r.norm - oracle).abs() <= 1e-10 * oracle, || {
                format!("M={m} theta={theta}: norm {} differs from closed form {oracle}", r.norm)
            })?;
            worst = worst.min(r.norm - sqrt_m);
        }
    }
    Ok(format!("min(norm - sqrt(M)) = {worst:.3e}"))
}

fn criterion_2() -> Outcome {
    let mut worst = f64::INFINITY;
    for m in BLOCK_SIZES {
        for radius in [1.5, 2.0, 3.0] {
            let bound = 1.0 / (radius - 1.0);
            for theta in unit_angles() {
                let r = shift_bounds_report(m, Complex::from_polar(radius, theta)).map_err(|e| e.to_string())?;
                check(r.norm <= bound + 1e-9 && !r.violation, || {
                    format!("M={m} |lambda|={radius}: norm {} above {bound}", r.norm)
                })?;
                if radius == 2.0 {
                    check(r.norm <= 1.0 + 1e-9, || format!("M={m} |lambda|=2: norm {}", r.norm))?;
                }
                worst = worst.min(bound - r.norm);
            }
        }
    }
    Ok(format!("min(bound - norm) = {worst:.3e}"))
}

fn criterion_3() -> Outcome {
    let mut summary = Vec::new();
    for m in [8usize, 16, 32, 64] {
        let op = ModeOperator::new(m).map_err(|e| e.to_string())?;
        let peak = op.resolvent_norm(c(1.0, m as f64)).map_err(|e| e.to_string())?;
        check(peak.certified && peak.norm >= (m as f64).sqrt() - 1e-9, || {
            format!("M={m}: peak {peak:?}")
        })?;
        check((peak.norm - unit_circle_norm(m)).abs() <= 1e-10 * peak.norm, || {
            format!(
                "M={m}: peak {} differs from closed form {}",
                peak.norm,
                unit_circle_norm(m)
            )
        })?;
        let t_max = (((m - 2) * (m - 2)) as f64 - 1.0).sqrt();
        let mut line_max = 0.0f64;
        for j in 0..64 {
            let t = -t_max + 2.0 * t_max * j as f64 / 63.0;
            let r = op.resolvent_norm(c(1.0, t)).map_err(|e| e.to_string())?;
            check(r.certified && r.norm <= 1.0 + 1e-9, || format!("M={m} t={t}: {r:?}"))?;
            line_max = line_max.max(r.norm);
        }
        summary.push(format!("M={m}: peak {:.4} line max {:.4}", peak.norm, line_max));
    }
    Ok(summary.join("; "))
}

fn criterion_4() -> Outcome {
    let mut worst = f64::INFINITY;
    for t in [0.25, 0.5, 1.0, 2.0, 3.0] {
        for m in 1..=32 {
            let shift = op_norm2(&shift_exp(m, t).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            check(shift <= t.exp() + 1e-9, || format!("M={m} t={t}: |e^(tC)| = {shift}"))?;
            let bm = ModeOperator::new(m)
                .and_then(|op| op.exp_norm(t))
                .map_err(|e| e.to_string())?;
            check(bm <= (5.0 * t).exp() + 1e-9, || format!("M={m} t={t}: |e^(tB)| = {bm}"))?;
            // e^{4t} times a quantity in [1, e^t]
            check(bm >= (4.0 * t).exp() * (1.0 - 1e-12), || {
                format!("M={m} t={t}: |e^(tB)| = {bm} below e^(4t)")
            })?;
            worst = worst.min(((5.0 * t).exp() - bm) / (5.0 * t).exp());
        }
    }
    Ok(format!("min relative headroom under e^(5t) = {worst:.3e}"))
}

fn criterion_5() -> Outcome {
    let scan = DirectSumOperator::new(64)
        .and_then(|d| d.blowup_scan())
        .map_err(|e| e.to_string())?;
    check(scan.rows.len() == 64, || format!("{} rows", scan.rows.len()))?;
    check(scan.violations.is_empty(), || {
        format!("violations: {:?}", scan.violations)
    })?;
    for (i, row) in scan.rows.iter().enumerate() {
        let k = (i + 1) as f64;
        let running = row.running_max.ok_or("missing running max")?;
        check(row.certified, || format!("row k={k} not certified"))?;
        check(running >= k.sqrt() - 1e-9, || {
            format!("row k={k}: running max {running}")
        })?;
        if k >= 4.0 {
            // block M = k sits at distance 1; every other block is bounded by 1/(√2 - 1)
            let oracle = unit_circle_norm(k as usize);
            check((row.norm - oracle).abs() <= 1e-10 * oracle, || {
                format!("row k={k}: norm {} vs closed form {oracle}", row.norm)
            })?;
        }
    }
    let last = scan.rows[63].running_max.unwrap_or(0.0);
    check(last >= 8.0, || format!("running max at k=64 is {last}"))?;

    let doubled = DirectSumOperator::new(128).map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for row in &scan.rows[..62] {
        let r = doubled.resolvent_norm(row.lambda).map_err(|e| e.to_string())?;
        check(r.certified, || {
            format!("lambda={} uncertified at M_max=128", row.lambda)
        })?;
        drift = drift.max((r.norm - row.norm).abs());
    }
    check(drift <= 1e-12, || format!("doubling M_max moved a row by {drift:.3e}"))?;
    Ok(format!("running max at k=64 = {last:.4}, tail drift = {drift:.1e}"))
}

fn criterion_6() -> Outcome {
    let report = krivine_suite(500, SEED).map_err(|e| e.to_string())?;
    check(report.passed() && report.worst_margin >= -1e-10, || {
        format!("{report:?}")
    })?;
    let dual = report.dual_max_rel_error.unwrap_or(f64::INFINITY);
    check(dual <= 1e-10, || format!("dual representation error {dual:.3e}"))?;
    // plain re-evaluation of both sides, without the library's scaled sums
    for trial in 0..500 {
        let (p_mat, fam) = krivine_trial_inputs(SEED, trial);
        let p = fam.p();
        let d = fam.dim();
        let pm = p_mat.as_cmatrix();
        let sum_p = |vals: &mut dyn Iterator<Item = f64>| vals.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        let norms: Vec<f64> = (0..d)
            .map(|j| sum_p(&mut fam.vectors().iter().map(|f| f[j].norm())))
            .collect();
        let images: Vec<Vec<Complex>> = fam.vectors().iter().map(|f| pm.matvec(f)).collect();
        let col_sum = (0..d)
            .map(|j| (0..d).map(|i| pm[(i, j)].re).sum::<f64>())
            .fold(0.0, f64::max);
        let fmax = fam
            .vectors()
            .iter()
            .map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let scale = (col_sum * fmax).max(f64::MIN_POSITIVE);
        for i in 0..d {
            let rhs: f64 = (0..d).map(|j| pm[(i, j)].re * norms[j]).sum();
            let lhs = sum_p(&mut images.iter().map(|g| g[i].norm()));
            check(rhs - lhs >= -1e-10 * scale, || {
                format!("trial {trial} component {i}: {rhs} < {lhs}")
            })?;
        }
    }
    Ok(format!(
        "500 trials, worst normalized margin {:.3e}, dual error {dual:.1e}",
        report.worst_margin
    ))
}

fn criterion_7() -> Outcome {
    let report = dynamics::laplace_suite(100, SEED).map_err(|e| e.to_string())?;
    check(report.passed() && report.worst <= 1e-6, || format!("{report:?}"))?;
    // closed form for a scalar generator: ∫_0^∞ e^{(a-λ)s} ds = 1/(λ - a)
    let scalar = GeneratorSpec::metzler(CMatrix::from_real_rows(&[vec![-0.7]])).map_err(|e| e.to_string())?;
    for re in LAPLACE_GRID_RE {
        for im in LAPLACE_GRID_IM {
            let lambda = c(-0.7 + re, im);
            let chk = laplace_check(&scalar, lambda, &[1.0], None, 4096).map_err(|e| e.to_string())?;
            check(chk.rel_error <= 1e-6, || format!("scalar at {lambda}: {chk:?}"))?;
        }
    }
    Ok(format!(
        "100 trials x 9 grid points, worst relative error {:.3e}",
        report.worst
    ))
}

fn criterion_8() -> Outcome {
    let mut worst = f64::INFINITY;
    for trial in 0..100 {
        let (spec, f, horizon, p) = convolution_trial_inputs(SEED, trial).map_err(|e| e.to_string())?;
        let r = convolution_margin(&spec, &f, horizon, p, 32).map_err(|e| e.to_string())?;
        check(r.margin >= -r.tol_quad, || format!("trial {trial}: {r:?}"))?;
        if trial % 10 == 0 {
            // finer grid as a quadrature oracle for the sign
            let fine = convolution_margin(&spec, &f, horizon, p, 128).map_err(|e| e.to_string())?;
            check(fine.margin >= -fine.tol_quad, || {
                format!("trial {trial} fine grid: {fine:?}")
            })?;
            check(
                (fine.lhs - r.lhs).abs() <= r.tol_quad + fine.tol_quad + 1e-12 * r.rhs,
                || {
                    format!(
                        "trial {trial}: lhs {} vs fine {} beyond the reported tolerance",
                        r.lhs, fine.lhs
                    )
                },
            )?;
        }
        worst = worst.min(r.margin / r.rhs.max(f64::MIN_POSITIVE));
    }
    let scalar = GeneratorSpec::metzler(CMatrix::from_real_rows(&[vec![-1.0]])).map_err(|e| e.to_string())?;
    let one = StepFunction::constant(vec![1.0]).map_err(|e| e.to_string())?;
    for p in [1.0, 2.0, 3.0] {
        let r = convolution_margin(&scalar, &one, 10.0, p, 16).map_err(|e| e.to_string())?;
        check(r.margin >= 0.0, || format!("scalar case p={p}: {r:?}"))?;
    }
    Ok(format!(
        "100 trials, worst relative margin {worst:.3e}; scalar case margin >= 0"
    ))
}

/// Top singular value by plain power iteration on `R^H R`.
fn power_norm(r: &CMatrix) -> f64 {
    let n = r.cols();
    let mut x: Vec<Complex> = (0..n).map(|i| c(1.0 + i as f64 * 0.1, 0.3)).collect();
    let mut value = 0.0;
    for _ in 0..3000 {
        let y = r.adjoint_matvec(&r.matvec(&x));
        let len = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        x = y.iter().map(|z| z / len).collect();
        value = r.matvec(&x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    value
}

fn criterion_9() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for trial in 0..25 {
        let spec = hyperbolicity_trial_inputs(SEED, trial).map_err(|e| e.to_string())?;
        let n = dynamics::HYPERBOLICITY_MODES;
        let r = hyperbolicity_constant(
            &spec,
            n,
            2.0,
            dynamics::default_quad_points(n),
            dynamics::HYPERBOLICITY_FAMILIES,
            SEED + trial,
        )
        .map_err(|e| e.to_string())?;
        let (Some(lower), Some(exact)) = (r.c_lower, r.c_exact_p2) else {
            return Err(format!("trial {trial}: spectrum not clear of the imaginary axis"));
        };
        let oracle = (-(n as i64)..=n as i64)
            .map(|k| resolvent_matrix(spec.matrix(), c(0.0, k as f64)).map(|m| power_norm(&m)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(0.0, f64::max);
        check(oracle <= exact * (1.0 + 1e-12) && oracle >= exact * 0.999, || {
            format!("trial {trial}: exact {exact} vs power-iteration oracle {oracle}")
        })?;
        let ratio = lower / exact;
        check((0.98..=1.0 + 1e-8).contains(&ratio), || {
            format!("trial {trial}: ratio {ratio}")
        })?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(format!("25 trials, c_lower/c_exact in [{lo:.12}, {hi:.12}]"))
}

fn criterion_10() -> Outcome {
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let spec = growth_trial_inputs(SEED, trial).map_err(|e| e.to_string())?;
        let g = growth_estimate(&spec, 200.0, dynamics::GROWTH_SAMPLES).map_err(|e| e.to_string())?;
        check(g.gap() <= 0.05, || {
            format!(
                "trial {trial} (d={}): omega_hat {} vs s {}",
                spec.dim(),
                g.omega_hat,
                g.s_value
            )
        })?;
        worst = worst.max(g.gap());
    }
    Ok(format!("50 matrices, max |omega_hat - s| = {worst:.3e}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "shift resolvent lower bound on |lambda| = 1",
            budget: Duration::from_secs(10),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "shift resolvent upper bound for |lambda| > 1",
            budget: Duration::from_secs(10),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "B_M peak and vertical-line bound",
            budget: Duration::from_secs(60),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "semigroup norm envelopes",
            budget: Duration::from_secs(10),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "direct-sum blow-up and tail soundness",
            budget: Duration::from_secs(180),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "lattice p-sum inequality and dual representation",
            budget: Duration::from_secs(30),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "Laplace representation of the resolvent",
            budget: Duration::from_secs(30),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "convolution inequality",
            budget: Duration::from_secs(60),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            name: "hyperbolicity constant at p = 2",
            budget: Duration::from_secs(60),
            run: criterion_9,
        },
        Criterion {
            id: 10,
            name: "growth bound equals spectral bound",
            budget: Duration::from_secs(30),
            run: criterion_10,
        },
    ];
    let mut failed = 0;
    for cr in &criteria {
        let start = Instant::now();
        let outcome = (cr.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > cr.budget => Err(format!("{detail}; took {elapsed:.1?}, budget {:?}", cr.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {} ({elapsed:.2?}): {detail}", cr.id, cr.name),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({elapsed:.2?}): {why}", cr.id, cr.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
