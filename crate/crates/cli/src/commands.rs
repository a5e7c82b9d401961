// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;
use std::path::Path;

use dichotomy_core::directsum::{DirectSumOperator, CSV_HEADER};
use dichotomy_core::dynamics::{
    self, convolution_margin, default_quad_points, growth_estimate, hyperbolicity_constant, laplace_check,
    GeneratorSpec, SuiteReport, LAPLACE_TOL,
};
use dichotomy_core::lattice::{self, InequalityReport, VIOLATION_TOL};
use dichotomy_core::modeop::{ModeOperator, ResolventReport};
use dichotomy_core::shiftblock::{shift_bounds_report, BOUND_SLACK};
use dichotomy_core::{CMatrix, Complex, StepFunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::output::{csv, fnum, num, opt_num, Output};

type Res<T> = Result<T, String>;

fn value<T: Serialize>(x: &T) -> Res<Value> {
    serde_json::to_value(x).map_err(|e| e.to_string())
}

fn core<T>(r: dichotomy_core::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Res<T> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {what} {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed {what} {}: {e}", path.display()))
}

fn load_generator(path: &Path) -> Res<GeneratorSpec> {
    core(GeneratorSpec::new(read_json::<CMatrix>(path, "matrix")?))
}

pub fn dispatch(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Shift { m, lambda } => shift(*m, lambda),
        Command::Bm { m, lambda, t } => bm(*m, lambda, t),
        Command::Dsum { m_max, lambda } => dsum(*m_max, lambda),
        Command::Counterexample { m_max } => counterexample(*m_max),
        Command::Krivine { trials } => inequality("krivine", core(lattice::krivine_suite(*trials, cli.seed))?),
        Command::Minkowski { trials } => inequality("minkowski", core(lattice::minkowski_suite(*trials, cli.seed))?),
        Command::Laplace {
            input,
            trials,
            lambda,
            g,
            horizon,
            steps,
        } => match &input.matrix {
            Some(path) => laplace_single(&load_generator(path)?, *lambda, g, *horizon, *steps),
            None => suite(
                "laplace",
                core(dynamics::laplace_suite(*trials, cli.seed))?,
                "worst relative error",
            ),
        },
        Command::Convolution {
            input,
            step,
            trials,
            horizon,
            p,
            panels,
        } => match (&input.matrix, step) {
            (Some(m), Some(s)) => {
                let f: StepFunction = read_json(s, "step function")?;
                convolution_single(&load_generator(m)?, &f, *horizon, *p, *panels)
            }
            (None, None) => suite(
                "convolution",
                core(dynamics::convolution_suite(*trials, cli.seed, *panels))?,
                "smallest margin + tolerance",
            ),
            _ => Err("--matrix and --step must be given together".into()),
        },
        Command::Hyperbolicity {
            input,
            trials,
            n_modes,
            p,
            quad,
            families,
        } => {
            let quad = quad.unwrap_or_else(|| default_quad_points(*n_modes));
            match &input.matrix {
                Some(path) => hyperbolicity_single(&load_generator(path)?, *n_modes, *p, quad, *families, cli.seed),
                None if *p == 2.0 => suite(
                    "hyperbolicity",
                    core(dynamics::hyperbolicity_suite(*trials, cli.seed, *n_modes, *families))?,
                    "smallest c_lower / c_exact_p2",
                ),
                None => Err("the seeded hyperbolicity suite runs at p = 2; pass --matrix for other p".into()),
            }
        }
        Command::Growth {
            input,
            trials,
            t_max,
            samples,
        } => match &input.matrix {
            Some(path) => growth_single(&load_generator(path)?, *t_max, *samples),
            None => suite(
                "growth",
                core(dynamics::growth_suite(*trials, cli.seed, *t_max, *samples))?,
                "largest |omega_hat - s|",
            ),
        },
    }
}

fn shift(m: usize, lambda: &[Complex]) -> Res<Output> {
    let points: Vec<Complex> = if lambda.is_empty() {
        (0..32)
            .map(|j| Complex::from_polar(1.0, TAU * j as f64 / 32.0))
            .collect()
    } else {
        lambda.to_vec()
    };
    let reports = points
        .iter()
        .map(|&z| core(shift_bounds_report(m, z)))
        .collect::<Res<Vec<_>>>()?;
    let bad: Vec<_> = reports.iter().filter(|r| r.violation).collect();
    let rows = reports.iter().map(|r| {
        vec![
            num(r.m),
            fnum(r.lambda.re),
            fnum(r.lambda.im),
            fnum(r.norm),
            opt_num(r.lower),
            opt_num(r.upper),
            num(r.violation),
        ]
    });
    Ok(Output {
        command: "shift",
        csv: csv("M,re,im,norm,lower,upper,violation", rows),
        verdict: if bad.is_empty() {
            format!("{} point(s), every norm within its closed-form bounds", reports.len())
        } else {
            format!(
                "{} of {} point(s) violate a closed-form bound",
                bad.len(),
                reports.len()
            )
        },
        violation: (!bad.is_empty()).then(|| json!({ "kind": "shift_bound", "reports": value(&bad).ok() })),
        result: value(&reports)?,
        tolerances: json!({ "bound_slack": BOUND_SLACK, "unit_modulus": 1e-12 }),
    })
}

fn resolvent_rows(reports: &[ResolventReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                fnum(r.lambda.re),
                fnum(r.lambda.im),
                fnum(r.norm),
                num(r.attained.m),
                num(r.attained.n),
                num(r.certified),
                fnum(r.pruning_radius),
            ]
        })
        .collect()
}

fn bm(m: usize, lambda: &[Complex], times: &[f64]) -> Res<Output> {
    let op = core(ModeOperator::new(m))?;
    let points: Vec<Complex> = if !lambda.is_empty() {
        lambda.to_vec()
    } else {
        let mut pts = vec![Complex::new(1.0, m as f64)];
        if m >= 3 {
            let t_max = ((m as f64 - 2.0).powi(2) - 1.0).sqrt();
            pts.extend((0..64).map(|j| Complex::new(1.0, -t_max + 2.0 * t_max * j as f64 / 63.0)));
        }
        pts
    };
    let reports = points
        .iter()
        .map(|&z| core(op.resolvent_norm(z)))
        .collect::<Res<Vec<_>>>()?;
    let mut bad = Vec::new();
    for r in &reports {
        let on_line = r.lambda.re == 1.0;
        if on_line && r.lambda.im == m as f64 && r.norm < (m as f64).sqrt() - BOUND_SLACK {
            bad.push(json!({ "bound": "norm >= sqrt(M) at 1 + iM", "report": value(r)? }));
        }
        if on_line && r.lambda.norm() <= m as f64 - 2.0 && r.norm > 1.0 + BOUND_SLACK {
            bad.push(json!({ "bound": "norm <= 1 on Re lambda = 1, |lambda| <= M - 2", "report": value(r)? }));
        }
    }
    let mut exp = Vec::new();
    for &t in times {
        let norm = core(op.exp_norm(t))?;
        let envelope = (5.0 * t).exp();
        if norm > envelope + BOUND_SLACK {
            bad.push(json!({ "bound": "|e^(tB_M)| <= e^(5t)", "t": t, "norm": norm }));
        }
        exp.push(json!({ "t": t, "norm": norm, "envelope": envelope }));
    }
    let uncertified = reports.iter().filter(|r| !r.certified).count();
    Ok(Output {
        command: "bm",
        csv: csv(
            "re,im,norm,attained_M,attained_n,certified,pruning_radius",
            resolvent_rows(&reports),
        ),
        verdict: format!(
            "{} point(s), {} uncertified (lower bounds), {} bound violation(s)",
            reports.len(),
            uncertified,
            bad.len()
        ),
        violation: (!bad.is_empty()).then(|| json!({ "kind": "bm_bound", "failures": bad })),
        result: json!({ "M": m, "resolvent": value(&reports)?, "exp_norms": exp }),
        tolerances: json!({ "bound_slack": BOUND_SLACK, "exclusion": dichotomy_core::modeop::EXCLUSION_TOL }),
    })
}

fn dsum(m_max: usize, lambda: &[Complex]) -> Res<Output> {
    let op = core(DirectSumOperator::new(m_max))?;
    let (grid, description) = if lambda.is_empty() {
        let mut g = Vec::new();
        for re in [-1.0, 1.0, 2.0, 6.0] {
            for j in 0..=32 {
                g.push(Complex::new(re, -8.0 + 0.5 * j as f64));
            }
        }
        (g, "Re in {-1, 1, 2, 6}, Im from -8 to 8 step 0.5".to_string())
    } else {
        (lambda.to_vec(), format!("{} user point(s)", lambda.len()))
    };
    let table = op.spectrum_enclosure_report(&grid, &description);
    let uncertified = table.rows.iter().filter(|r| !r.certified).count();
    Ok(Output {
        command: "dsum",
        csv: table.to_csv(),
        verdict: format!(
            "{} point(s) evaluated, {} skipped near the spectrum enclosure, {} uncertified (lower bounds)",
            table.rows.len(),
            table.skipped.len(),
            uncertified
        ),
        violation: None,
        result: value(&table)?,
        tolerances: json!({ "enclosure_margin": dichotomy_core::directsum::ENCLOSURE_MARGIN }),
    })
}

fn counterexample(m_max: usize) -> Res<Output> {
    let table = core(DirectSumOperator::new(m_max).and_then(|d| d.blowup_scan()))?;
    let peak = table.rows.last().and_then(|r| r.running_max).unwrap_or(0.0);
    debug_assert!(table.to_csv().starts_with(CSV_HEADER));
    Ok(Output {
        command: "counterexample",
        csv: table.to_csv(),
        verdict: match &table.interpretation {
            Some(line) => line.clone(),
            None => format!("running max {peak} at k = {m_max}"),
        },
        violation: (!table.violations.is_empty())
            .then(|| json!({ "kind": "blowup", "violations": table.violations.clone() })),
        result: value(&table)?,
        tolerances: json!({ "bound_slack": BOUND_SLACK }),
    })
}

fn inequality(command: &'static str, r: InequalityReport) -> Res<Output> {
    let row = vec![
        num(r.trials),
        num(r.seed),
        fnum(r.worst_margin),
        num(r.violations),
        opt_num(r.dual_max_rel_error),
        fnum(VIOLATION_TOL),
    ];
    Ok(Output {
        command,
        csv: csv(
            "trials,seed,worst_margin,violations,dual_max_rel_error,tolerance",
            [row],
        ),
        verdict: format!(
            "{} trial(s), worst normalized margin {}, {} violation(s)",
            r.trials,
            fnum(r.worst_margin),
            r.violations
        ),
        violation: (!r.passed()).then(|| json!({ "kind": command, "violations": r.violations, "witness": r.witness })),
        result: value(&r)?,
        tolerances: json!({ "margin": -VIOLATION_TOL }),
    })
}

fn suite(command: &'static str, r: SuiteReport, statistic: &str) -> Res<Output> {
    let row = vec![
        num(r.trials),
        num(r.seed),
        fnum(r.worst),
        num(r.failures),
        fnum(r.tolerance),
    ];
    Ok(Output {
        command,
        csv: csv("trials,seed,worst,failures,tolerance", [row]),
        verdict: format!(
            "{} trial(s), {statistic} {}, {} failure(s)",
            r.trials,
            fnum(r.worst),
            r.failures
        ),
        violation: (!r.passed()).then(|| json!({ "kind": command, "report": value(&r).ok() })),
        result: value(&r)?,
        tolerances: json!({ "tolerance": r.tolerance }),
    })
}

fn laplace_single(
    spec: &GeneratorSpec,
    lambda: Option<Complex>,
    g: &[f64],
    horizon: Option<f64>,
    steps: usize,
) -> Res<Output> {
    let lambda = match lambda {
        Some(z) => z,
        None => Complex::new(core(spec.spectral_bound())? + 1.0, 0.0),
    };
    let g = if g.is_empty() {
        vec![1.0; spec.dim()]
    } else {
        g.to_vec()
    };
    let r = core(laplace_check(spec, lambda, &g, horizon, steps))?;
    let row = vec![
        fnum(lambda.re),
        fnum(lambda.im),
        fnum(r.rel_error),
        fnum(r.quad_error),
        fnum(r.horizon),
        num(r.panels),
        fnum(r.spectral_bound),
    ];
    Ok(Output {
        command: "laplace",
        csv: csv("re,im,rel_error,quad_error,horizon,panels,spectral_bound", [row]),
        verdict: format!("relative error {} (limit {LAPLACE_TOL:e})", fnum(r.rel_error)),
        violation: (r.rel_error > LAPLACE_TOL || r.rel_error.is_nan())
            .then(|| json!({ "kind": "laplace", "report": value(&r).ok() })),
        result: json!({ "lambda": [lambda.re, lambda.im], "check": value(&r)? }),
        tolerances: json!({ "rel_error": LAPLACE_TOL, "tail": dynamics::LAPLACE_TAIL }),
    })
}

fn convolution_single(spec: &GeneratorSpec, f: &StepFunction, horizon: f64, p: f64, panels: usize) -> Res<Output> {
    let r = core(convolution_margin(spec, f, horizon, p, panels))?;
    let row = vec![
        fnum(r.p),
        fnum(r.horizon),
        fnum(r.lhs),
        fnum(r.rhs),
        fnum(r.margin),
        fnum(r.tol_quad),
        fnum(r.inverse_norm),
    ];
    Ok(Output {
        command: "convolution",
        csv: csv("p,horizon,lhs,rhs,margin,tol_quad,inverse_norm", [row]),
        verdict: format!(
            "margin {} with quadrature tolerance {}",
            fnum(r.margin),
            fnum(r.tol_quad)
        ),
        violation: (!r.holds()).then(|| json!({ "kind": "convolution", "report": value(&r).ok() })),
        result: value(&r)?,
        tolerances: json!({ "tol_quad": r.tol_quad }),
    })
}

fn hyperbolicity_single(
    spec: &GeneratorSpec,
    n_modes: usize,
    p: f64,
    quad: usize,
    families: u64,
    seed: u64,
) -> Res<Output> {
    let r = core(hyperbolicity_constant(spec, n_modes, p, quad, families, seed))?;
    let ratio = r.c_lower.zip(r.c_exact_p2).map(|(lo, ex)| lo / ex);
    let bad = ratio.is_some_and(|q| !(0.98..=1.0 + 1e-8).contains(&q));
    let row = vec![
        num(r.spectrum_clear),
        opt_num(r.c_lower),
        opt_num(r.c_exact_p2),
        r.maximizing_mode.map(num).unwrap_or_default(),
        fnum(r.quad_error),
        fnum(r.p),
        num(r.n_modes),
    ];
    let verdict = if !r.spectrum_clear {
        "an eigenvalue lies on the imaginary axis within the mode window; no constant".to_string()
    } else {
        match ratio {
            Some(q) => format!("c_lower / c_exact_p2 = {q}, quadrature error {}", fnum(r.quad_error)),
            None => format!(
                "c_lower = {}, quadrature error {}",
                opt_num(r.c_lower),
                fnum(r.quad_error)
            ),
        }
    };
    Ok(Output {
        command: "hyperbolicity",
        csv: csv(
            "spectrum_clear,c_lower,c_exact_p2,maximizing_mode,quad_error,p,n_modes",
            [row],
        ),
        verdict,
        violation: bad.then(|| json!({ "kind": "hyperbolicity", "report": value(&r).ok() })),
        result: value(&r)?,
        tolerances: json!({ "ratio_range": [0.98, 1.0 + 1e-8], "axis_clearance": dynamics::AXIS_CLEARANCE }),
    })
}

fn growth_single(spec: &GeneratorSpec, t_max: f64, samples: usize) -> Res<Output> {
    let g = core(growth_estimate(spec, t_max, samples))?;
    let row = vec![fnum(g.omega_hat), fnum(g.s_value), fnum(g.gap()), fnum(g.tolerance())];
    Ok(Output {
        command: "growth",
        csv: csv("omega_hat,s_value,gap,tolerance", [row]),
        verdict: format!("|omega_hat - s| = {} (tolerance {})", fnum(g.gap()), g.tolerance()),
        violation: (g.gap() > g.tolerance()).then(|| json!({ "kind": "growth", "estimate": value(&g).ok() })),
        result: value(&g)?,
        tolerances: json!({ "gap": g.tolerance() }),
    })
}
