// SPDX-License-Identifier: Apache-2.0

//! Composite trapezoid rules with Richardson error estimates.

use crate::numlin::Complex;

/// Quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn trapezoid_stride(samples: &[f64], h: f64, stride: usize) -> f64 {
    let n = samples.len() - 1;
    let inner: f64 = (stride..n).step_by(stride).map(|i| samples[i]).sum();
    h * stride as f64 * (inner + 0.5 * (samples[0] + samples[n]))
}

/// Trapezoid rule on `N + 1` equispaced samples (`N` even, spacing `h`).
/// The error estimate is `|T_N - T_{N/2}| / 3`.
pub fn trapezoid(samples: &[f64], h: f64) -> Estimate {
    let n = samples.len().saturating_sub(1);
    assert!(n >= 2 && n % 2 == 0, "trapezoid needs an even number of panels");
    let fine = trapezoid_stride(samples, h, 1);
    let coarse = trapezoid_stride(samples, h, 2);
    Estimate {
        value: fine,
        error: (fine - coarse).abs() / 3.0,
    }
}

/// Mean-value rule `(2π/L) Σ f(2πj/L)` for a 2π-periodic integrand sampled
/// at `L` points (`L` even); error estimated against the `L/2` rule.
pub fn periodic(samples: &[f64]) -> Estimate {
    let l = samples.len();
    assert!(l >= 2 && l % 2 == 0, "periodic rule needs an even number of points");
    let tau = std::f64::consts::TAU;
    let fine = tau / l as f64 * samples.iter().sum::<f64>();
    let coarse = tau / (l / 2) as f64 * samples.iter().step_by(2).sum::<f64>();
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

/// Romberg extrapolation of the trapezoid rule for vector-valued samples.
///
/// Uses as many halvings as `N` admits, up to `max_levels`. Returns the
/// extrapolated vector and the 2-norm of its difference from the previous
/// diagonal entry of the Richardson table.
pub fn romberg(samples: &[Vec<Complex>], h: f64, max_levels: usize) -> (Vec<Complex>, f64) {
    let n = samples.len().saturating_sub(1);
    assert!(n >= 2 && n % 2 == 0, "romberg needs an even number of panels");
    let dim = samples[0].len();
    let mut levels = 0;
    while levels < max_levels && n % (1 << (levels + 1)) == 0 && n >> (levels + 1) >= 1 {
        levels += 1;
    }
    let trap = |stride: usize| -> Vec<Complex> {
        let mut acc = vec![Complex::new(0.0, 0.0); dim];
        for i in (stride..n).step_by(stride) {
            for (a, s) in acc.iter_mut().zip(&samples[i]) {
                *a += s;
            }
        }
        for (a, (s0, sn)) in acc.iter_mut().zip(samples[0].iter().zip(&samples[n])) {
            *a = (*a + 0.5 * (s0 + sn)) * (h * stride as f64);
        }
        acc
    };
    // row j uses stride 2^(levels - j), so row `levels` is the finest
    let mut table: Vec<Vec<Vec<Complex>>> = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        let mut row = vec![trap(1 << (levels - j))];
        for k in 1..=j {
            let factor = 4f64.powi(k as i32) - 1.0;
            let prev = &table[j - 1][k - 1];
            let cur = &row[k - 1];
            let next: Vec<Complex> = cur.iter().zip(prev).map(|(c, p)| c + (c - p) / factor).collect();
            row.push(next);
        }
        table.push(row);
    }
    let best = table[levels][levels].clone();
    let prev = &table[levels - 1][levels - 1];
    let err = best
        .iter()
        .zip(prev)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (best, err)
}
