// SPDX-License-Identifier: Apache-2.0

//! `B_M = A_M ⊗ I + I ⊗ C_M` in Fourier-mode form.
//!
//! `A_M f = 4·mean(f) + M f'` acts on `e^{inx}` by the scalar `μ_n`, with
//! `μ_0 = 4` and `μ_n = inM` otherwise, so `B_M` is the block-diagonal family
//! `μ_n + C_M`. The resolvent norm is the supremum over modes of
//! `‖(λ - μ_n - C_M)^{-1}‖`. Modes are visited in order of increasing
//! `|λ - μ_n|`; any mode with `|λ - μ_n| ≥ R` is bounded by `1/(R - 1)`, which
//! turns the supremum into a finite certified computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::complex_pair;
use crate::numlin::{op_norm2, Complex};
use crate::shiftblock::ShiftBlock;

/// `λ` closer than this to a point of `σ(B_M)` is rejected.
pub const EXCLUSION_TOL: f64 = 1e-8;

/// Initial pruning radius; at `R = 2` the tail bound equals 1.
const INITIAL_RADIUS: f64 = 2.0;

/// Exact mode evaluations allowed before reporting an uncertified bound.
pub const MAX_EXAMINED_MODES: usize = 64;

/// Scalar `μ_n` carried by Fourier mode `n`.
pub fn mode_shift(m: usize, n: i64) -> Complex {
    if n == 0 {
        Complex::new(4.0, 0.0)
    } else {
        Complex::new(0.0, n as f64 * m as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attained {
    #[serde(rename = "M")]
    pub m: usize,
    pub n: i64,
}

/// Resolvent norm with the block/mode attaining it.
///
/// `certified` means every mode not evaluated exactly is provably below
/// `norm`; otherwise `norm` is only a lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventReport {
    #[serde(with = "complex_pair")]
    pub lambda: Complex,
    pub norm: f64,
    pub attained: Attained,
    pub pruning_radius: f64,
    pub certified: bool,
    /// `norm` is the supremum of the mean-mode norms `‖(λ - 4 - C_M)^{-1}‖`
    /// as `M → ∞`; no finite block attains it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub limit: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeOperator {
    block: ShiftBlock,
}

impl ModeOperator {
    pub fn new(m: usize) -> Result<Self> {
        Ok(ModeOperator {
            block: ShiftBlock::new(m)?,
        })
    }

    pub fn m(&self) -> usize {
        self.block.dim()
    }

    pub fn block(&self) -> ShiftBlock {
        self.block
    }

    pub fn mode_shift(&self, n: i64) -> Complex {
        mode_shift(self.m(), n)
    }

    /// Distance from `λ` to the nearest point of `σ(B_M)` and that point.
    pub fn nearest_spectrum_point(&self, lambda: Complex) -> (f64, Complex) {
        let first = ModeWalk::new(lambda, self.m()).peek();
        (first.dist, self.mode_shift(first.n))
    }

    /// `‖(λ - B_M)^{-1}‖`
    pub fn resolvent_norm(&self, lambda: Complex) -> Result<ResolventReport> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        let mut walk = ModeWalk::new(lambda, self.m());
        let nearest = walk.peek();
        if nearest.dist < EXCLUSION_TOL {
            return Err(Error::InBlockSpectrum {
                lambda,
                point: self.mode_shift(nearest.n),
                distance: nearest.dist,
            });
        }

        let mut radius = INITIAL_RADIUS;
        let mut best: Option<(f64, i64)> = None;
        let mut examined = 0usize;
        let certified = 'levels: loop {
            while walk.peek().dist < radius {
                let cand = walk.next_mode();
                if let (Some(bound), Some((top, _))) = (ShiftBlock::resolvent_bound(cand.z), best) {
                    if bound < top {
                        // every later mode is farther out, hence bounded below `top` too
                        radius = cand.dist;
                        break 'levels true;
                    }
                }
                let norm = op_norm2(&self.block.resolvent(cand.z)?)?;
                examined += 1;
                if better(norm, cand.n, best) {
                    best = Some((norm, cand.n));
                }
                if examined >= MAX_EXAMINED_MODES {
                    break;
                }
            }
            let top = best.map_or(0.0, |b| b.0);
            if 1.0 / (radius - 1.0) < top {
                break true;
            }
            if examined >= MAX_EXAMINED_MODES || radius > 1e300 {
                break false;
            }
            radius *= 2.0;
        };
        let (norm, n) = best.unwrap_or((0.0, 0));
        Ok(ResolventReport {
            lambda,
            norm,
            attained: Attained { m: self.m(), n },
            pruning_radius: radius,
            certified,
            limit: false,
        })
    }

    /// `‖e^{tB_M}‖ = e^{4t} ‖e^{tC_M}‖`; the rotation modes contribute
    /// unimodular factors only.
    pub fn exp_norm(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
        }
        Ok((4.0 * t).exp() * op_norm2(&self.block.exp(t))?)
    }

    /// `{4} ∪ {inM : 0 < |n| ≤ window}`
    pub fn spectrum_points(&self, window: usize) -> Vec<Complex> {
        let mut pts = vec![self.mode_shift(0)];
        for n in 1..=window as i64 {
            pts.push(self.mode_shift(n));
            pts.push(self.mode_shift(-n));
        }
        pts
    }
}

/// Tie rule: larger norm, then smaller `|n|`, then smaller `n`.
pub(crate) fn better(norm: f64, n: i64, best: Option<(f64, i64)>) -> bool {
    match best {
        None => true,
        Some((b, bn)) => norm > b || (norm == b && (n.abs(), n) < (bn.abs(), bn)),
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    n: i64,
    z: Complex,
    dist: f64,
}

/// Fourier modes in order of increasing `|λ - μ_n|`.
struct ModeWalk {
    lambda: Complex,
    m: f64,
    left: i64,
    right: i64,
    zero_pending: bool,
}

impl ModeWalk {
    fn new(lambda: Complex, m: usize) -> Self {
        let m = m as f64;
        let center = (lambda.im / m).floor() as i64;
        ModeWalk {
            lambda,
            m,
            left: center,
            right: center + 1,
            zero_pending: true,
        }
    }

    fn candidate(&self, n: i64) -> Candidate {
        let z = if n == 0 {
            self.lambda - Complex::new(4.0, 0.0)
        } else {
            self.lambda - Complex::new(0.0, n as f64 * self.m)
        };
        Candidate { n, z, dist: z.norm() }
    }

    fn left_n(&self) -> i64 {
        if self.left == 0 {
            -1
        } else {
            self.left
        }
    }

    fn right_n(&self) -> i64 {
        if self.right == 0 {
            1
        } else {
            self.right
        }
    }

    fn choose(&self) -> (u8, Candidate) {
        let mut pick = (0u8, self.candidate(self.left_n()));
        let r = self.candidate(self.right_n());
        if key(&r) < key(&pick.1) {
            pick = (1, r);
        }
        if self.zero_pending {
            let z = self.candidate(0);
            if key(&z) < key(&pick.1) {
                pick = (2, z);
            }
        }
        pick
    }

    fn peek(&self) -> Candidate {
        self.choose().1
    }

    fn next_mode(&mut self) -> Candidate {
        let (side, cand) = self.choose();
        match side {
            0 => self.left = self.left_n() - 1,
            1 => self.right = self.right_n() + 1,
            _ => self.zero_pending = false,
        }
        cand
    }
}

fn key(c: &Candidate) -> (f64, i64, i64) {
    (c.dist, c.n.abs(), c.n)
}
