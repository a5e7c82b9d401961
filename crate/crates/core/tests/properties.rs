// SPDX-License-Identifier: Apache-2.0

use dichotomy_core::directsum::DirectSumOperator;
use dichotomy_core::lattice::{krivine_margin, minkowski_suite, VectorFamily};
use dichotomy_core::modeop::ModeOperator;
use dichotomy_core::numlin::{expm, inverse, op_norm2, pnorm_nonneg, spectral_bound, CMatrix, Complex, NonnegMatrix};
use dichotomy_core::shiftblock::shift_resolvent;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn complex_matrix(max_dim: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| CMatrix::new(n, n, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap())
    })
}

fn nonneg_rows(max_dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_dim).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), n))
}

fn metzler(max_dim: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(-3.0f64..1.0, n * n).prop_map(move |v| {
            CMatrix::from_fn(n, n, |i, j| {
                let x = v[i * n + j];
                c(if i == j { x } else { x.abs() }, 0.0)
            })
        })
    })
}

/// Largest column 2-norm.
fn max_column(a: &CMatrix) -> f64 {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_law(a in complex_matrix(8), s in 0.0f64..4.0, t in 0.0f64..4.0) {
        let lhs = expm(&a, s).unwrap().matmul(&expm(&a, t).unwrap());
        let rhs = expm(&a, s + t).unwrap();
        let scale = ((s + t) * op_norm2(&a).unwrap()).exp();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * scale);
    }

    #[test]
    fn resolvent_identity(a in complex_matrix(6), l in (2.0f64..4.0, -3.0f64..3.0), m in (-4.0f64..-2.0, -3.0f64..3.0)) {
        // shifting past ‖A‖₁ keeps both points off the spectrum
        let radius = a.norm1();
        let lambda = c(l.0 + radius, l.1);
        let mu = c(m.0 - radius, m.1);
        let rl = inverse(&a.scale(c(-1.0, 0.0)).shift_diagonal(lambda)).unwrap();
        let rm = inverse(&a.scale(c(-1.0, 0.0)).shift_diagonal(mu)).unwrap();
        let lhs = rl.sub(&rm).sub(&rl.matmul(&rm).scale(mu - lambda));
        let tol = 1e-8 * op_norm2(&rl).unwrap() * op_norm2(&rm).unwrap();
        prop_assert!(op_norm2(&lhs).unwrap() <= tol);
    }

    #[test]
    fn norm_sandwich(a in complex_matrix(10)) {
        let n = op_norm2(&a).unwrap();
        prop_assert!(max_column(&a) <= n * (1.0 + 1e-12));
        prop_assert!(n <= a.frobenius() * (1.0 + 1e-12));
        prop_assert!(n * n <= a.norm1() * a.adjoint().norm1() * (1.0 + 1e-12));
    }

    #[test]
    fn metzler_semigroups_are_positive(a in metzler(8), t in 0.0f64..5.0) {
        let e = expm(&a, t).unwrap();
        prop_assert!(e.entries().iter().all(|z| z.re >= -1e-12 && z.im.abs() <= 1e-12));
    }

    #[test]
    fn pnorm_is_monotone(p_rows in nonneg_rows(6), bump in prop::collection::vec(0.0f64..1.0, 36), p in 1.0f64..6.0) {
        let n = p_rows.len();
        let q_rows: Vec<Vec<f64>> = p_rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, v)| v + bump[i * n + j]).collect())
            .collect();
        let small = pnorm_nonneg(&NonnegMatrix::from_rows(&p_rows).unwrap(), p).unwrap();
        let large = pnorm_nonneg(&NonnegMatrix::from_rows(&q_rows).unwrap(), p).unwrap();
        prop_assert!(small <= large + 1e-8);
    }

    #[test]
    fn pnorm_two_matches_singular_value(rows in nonneg_rows(8)) {
        let m = NonnegMatrix::from_rows(&rows).unwrap();
        let boyd = pnorm_nonneg(&m, 2.0).unwrap();
        let svd = op_norm2(m.as_cmatrix()).unwrap();
        prop_assert!((boyd - svd).abs() <= 1e-8 * svd.max(1e-300));
    }

    #[test]
    fn eigenvalue_bound_of_triangular(diag in prop::collection::vec(-5.0f64..5.0, 1..10)) {
        let n = diag.len();
        let a = CMatrix::from_fn(n, n, |i, j| {
            if i == j { c(diag[i], 0.0) } else if j > i { c(0.5, -0.25) } else { c(0.0, 0.0) }
        });
        let expect = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((spectral_bound(&a).unwrap() - expect).abs() <= 1e-9);
    }

    #[test]
    fn krivine_margin_scales(rows in nonneg_rows(5), scale in 0.1f64..10.0, seed in 0u64..1000) {
        let d = rows.len();
        let vectors: Vec<Vec<Complex>> = (0..3)
            .map(|k| (0..d).map(|j| {
                let x = (seed as f64 + 1.7 * k as f64 + 0.3 * j as f64).sin();
                c(x, (x * 3.1).cos())
            }).collect())
            .collect();
        let fam = VectorFamily::new(vectors, 2.5).unwrap();
        let p = NonnegMatrix::from_rows(&rows).unwrap();
        let base = krivine_margin(&p, &fam).unwrap();
        let scaled = krivine_margin(&p.scale(scale), &fam).unwrap();
        prop_assert!(base >= -1e-10);
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * scale * base.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn certified_mode_max_matches_brute_force(m in 1usize..=16, re in 0.5f64..2.0, im in -40.0f64..40.0) {
        let lambda = c(re, im);
        let op = ModeOperator::new(m).unwrap();
        let r = op.resolvent_norm(lambda).unwrap();
        prop_assert!(r.certified);
        let window = (4.0 * (lambda.norm() / m as f64 + 2.0)).ceil() as i64;
        let brute = (-window..=window)
            .map(|n| op_norm2(&shift_resolvent(m, lambda - op.mode_shift(n)).unwrap()).unwrap())
            .fold(0.0, f64::max);
        prop_assert!((r.norm - brute).abs() <= 1e-12 * brute.max(1.0), "{} vs {}", r.norm, brute);
    }

    #[test]
    fn direct_sum_grows_with_truncation(re in 0.5f64..3.0, im in -12.0f64..12.0) {
        let lambda = c(re, im);
        prop_assume!((lambda - c(4.0, 0.0)).norm() > 1.01);
        let mut prev = 0.0;
        for m_max in [2, 4, 8, 16] {
            let r = DirectSumOperator::new(m_max).unwrap().resolvent_norm(lambda).unwrap();
            prop_assert!(r.norm >= prev * (1.0 - 1e-14));
            prev = r.norm;
        }
    }
}

#[test]
fn vertical_line_stays_bounded() {
    for m in [8usize, 16, 32] {
        let op = ModeOperator::new(m).unwrap();
        let t_max = (((m - 2) * (m - 2)) as f64 - 1.0).sqrt();
        for j in 0..64 {
            let t = -t_max + 2.0 * t_max * j as f64 / 63.0;
            let r = op.resolvent_norm(c(1.0, t)).unwrap();
            assert!(r.norm <= 1.0 + 1e-9, "M={m} t={t}: {r:?}");
        }
    }
}

#[test]
fn peak_growth_on_square_blocks() {
    for m in [4usize, 9, 16, 25, 36, 49, 64] {
        let r = ModeOperator::new(m).unwrap().resolvent_norm(c(1.0, m as f64)).unwrap();
        assert!(r.certified && r.norm >= (m as f64).sqrt() - 1e-9, "{r:?}");
    }
}

#[test]
fn exp_norm_below_envelope() {
    for m in [1usize, 3, 8, 20] {
        let op = ModeOperator::new(m).unwrap();
        for j in 0..=30 {
            let t = 0.1 * j as f64;
            assert!(op.exp_norm(t).unwrap() <= (5.0 * t).exp() + 1e-9);
        }
    }
}

#[test]
fn tail_soundness_under_doubling() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let m_max = 24;
    let d = DirectSumOperator::new(m_max).unwrap();
    let d2 = DirectSumOperator::new(2 * m_max).unwrap();
    for _ in 0..20 {
        let lambda = c(1.0, rng.random_range(-(m_max as f64 - 2.0)..=(m_max as f64 - 2.0)));
        let a = d.resolvent_norm(lambda).unwrap();
        let b = d2.resolvent_norm(lambda).unwrap();
        if a.certified {
            assert!((a.norm - b.norm).abs() <= 1e-12, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn minkowski_holds_on_random_grids() {
    let r = minkowski_suite(200, 11).unwrap();
    assert!(r.passed() && r.worst_margin >= -1e-10, "{r:?}");
}
