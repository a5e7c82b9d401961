// SPDX-License-Identifier: Apache-2.0

//! `D = ⊕_{M ≥ 1} B_M`, evaluated on the blocks `M ≤ M_max` with a certified
//! bound for the rest.
//!
//! For `M > M_max` every nonzero mode satisfies
//! `|λ - inM| ≥ ((Re λ)² + (M_max + 1 - |Im λ|)²)^{1/2}` once
//! `M_max + 1 > |Im λ|`, and mode 0 sits at distance `|λ - 4|`. Feeding the
//! smaller distance into the shift-block bound `1/(|z| - 1)` bounds every
//! unexamined block. A value is certified when all examined blocks are
//! certified and this tail bound is strictly below it; otherwise the
//! reported norm is a lower bound.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::complex_pair;
use crate::modeop::{Attained, ModeOperator, ResolventReport, EXCLUSION_TOL};
use crate::numlin::Complex;
use crate::shiftblock::ShiftBlock;

/// Grid points closer than this to the spectral enclosure are skipped.
pub const ENCLOSURE_MARGIN: f64 = 0.1;

pub const CSV_HEADER: &str = "re,im,norm,attained_M,attained_n,certified";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumOperator {
    blocks: Vec<ModeOperator>,
}

impl DirectSumOperator {
    pub fn new(m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::InvalidArgument("M_max must be at least 1".into()));
        }
        let blocks = (1..=m_max).map(ModeOperator::new).collect::<Result<_>>()?;
        Ok(DirectSumOperator { blocks })
    }

    pub fn m_max(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ModeOperator] {
        &self.blocks
    }

    /// Upper bound on `‖(λ - B_M)^{-1}‖` for every `M > M_max`, if one exists.
    pub fn tail_bound(&self, lambda: Complex) -> Option<f64> {
        let (zero, others) = self.tail_parts(lambda);
        Some(zero?.max(others?))
    }

    /// Tail over `M > M_max`, split by mode. The mean mode contributes
    /// `sup_M ‖(λ - 4 - C_M)^{-1}‖ = 1/(|λ - 4| - 1)` exactly (the norm of the
    /// Toeplitz operator with symbol `1/(λ - 4 - e^{iθ})`, approached but not
    /// attained); every other mode sits at distance at least
    /// `|Re λ + i(M_max + 1 - |Im λ|)|` from `λ`.
    fn tail_parts(&self, lambda: Complex) -> (Option<f64>, Option<f64>) {
        let zero = ShiftBlock::resolvent_bound(lambda - Complex::new(4.0, 0.0));
        let gap = (self.m_max() + 1) as f64 - lambda.im.abs();
        let others = if gap > 0.0 {
            ShiftBlock::resolvent_bound(Complex::new(lambda.re.abs(), gap))
        } else {
            None
        };
        (zero, others)
    }

    /// `sup_{M ≤ M_max} ‖(λ - B_M)^{-1}‖` with the tail certificate.
    ///
    /// Blocks are visited from the largest a-priori bound down and the sweep
    /// stops once no remaining block can reach the running maximum, so the
    /// result equals the full supremum over `M ≤ M_max`.
    pub fn resolvent_norm(&self, lambda: Complex) -> Result<ResolventReport> {
        let mut order: Vec<(f64, &ModeOperator)> = Vec::with_capacity(self.blocks.len());
        for op in &self.blocks {
            let (dist, point) = op.nearest_spectrum_point(lambda);
            if dist < EXCLUSION_TOL {
                return Err(Error::InBlockSpectrum {
                    lambda,
                    point,
                    distance: dist,
                });
            }
            let bound = ShiftBlock::resolvent_bound(Complex::new(dist, 0.0)).unwrap_or(f64::INFINITY);
            order.push((bound, op));
        }
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.m().cmp(&b.1.m())));

        let mut best: Option<ResolventReport> = None;
        let mut all_certified = true;
        for (bound, op) in order {
            if let Some(top) = &best {
                if bound < top.norm {
                    break;
                }
            }
            let report = op.resolvent_norm(lambda)?;
            all_certified &= report.certified;
            let replace = match &best {
                None => true,
                Some(top) => report.norm > top.norm || (report.norm == top.norm && report.attained.m < top.attained.m),
            };
            if replace {
                best = Some(report);
            }
        }
        let mut report = best.expect("at least one block");
        let (zero, others) = self.tail_parts(lambda);
        if let Some(z) = zero.filter(|&z| z > report.norm) {
            report.norm = z;
            report.attained = Attained { m: self.m_max(), n: 0 };
            report.limit = true;
        }
        report.certified = all_certified && zero.is_some() && others.is_some_and(|t| t < report.norm);
        Ok(report)
    }

    /// Certified resolvent norms on a grid of `λ` values away from
    /// `{|z - 4| ≤ 1} ∪ iℤ∖{0}`.
    pub fn spectrum_enclosure_report(&self, grid: &[Complex], description: &str) -> ScanTable {
        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        for &lambda in grid {
            let disk = (lambda - Complex::new(4.0, 0.0)).norm();
            let k = lambda.im.round();
            let axis = if k != 0.0 {
                (lambda - Complex::new(0.0, k)).norm()
            } else {
                f64::INFINITY
            };
            let reason = if disk < 1.0 + ENCLOSURE_MARGIN {
                Some(format!("within {ENCLOSURE_MARGIN} of the disk |z - 4| <= 1"))
            } else if axis < ENCLOSURE_MARGIN {
                Some(format!("within {ENCLOSURE_MARGIN} of {}i", k as i64))
            } else {
                None
            };
            if let Some(reason) = reason {
                skipped.push(SkippedPoint { lambda, reason });
                continue;
            }
            match self.resolvent_norm(lambda) {
                Ok(r) => rows.push(ScanRow::from_report(&r)),
                Err(e) => skipped.push(SkippedPoint {
                    lambda,
                    reason: e.to_string(),
                }),
            }
        }
        let mut table = ScanTable::new(self.m_max(), description.to_string(), rows, skipped);
        let uncertified = table.rows.iter().filter(|r| !r.certified).count();
        if uncertified > 0 {
            table.notes.push(format!(
                "{uncertified} grid point(s) could not be certified; their norms are lower bounds"
            ));
        }
        table
    }

    /// Resolvent norms at `λ = 1 + ik`, `k = 1..=M_max`.
    ///
    /// Block `M = k` has the mode `n = 1` at distance exactly 1, which forces
    /// the norm at row `k` to be at least `√k`. The running maximum is
    /// recorded per row and any row where it falls short is listed in
    /// `violations`.
    pub fn blowup_scan(&self) -> Result<ScanTable> {
        if self.m_max() < 4 {
            return Err(Error::InvalidArgument("blowup scan needs M_max >= 4".into()));
        }
        let mut rows = Vec::with_capacity(self.m_max());
        let mut running = 0.0f64;
        let mut violations = Vec::new();
        for k in 1..=self.m_max() {
            let report = self.resolvent_norm(Complex::new(1.0, k as f64))?;
            running = running.max(report.norm);
            let mut row = ScanRow::from_report(&report);
            row.running_max = Some(running);
            if running < (k as f64).sqrt() - 1e-9 {
                violations.push(format!("k = {k}: running max {running} < sqrt(k)"));
            }
            if !row.certified {
                violations.push(format!("k = {k}: norm {} not certified", row.norm));
            }
            rows.push(row);
        }
        let description = format!("lambda = 1 + ik, k = 1..={}", self.m_max());
        let mut table = ScanTable::new(self.m_max(), description, rows, Vec::new());
        let last = table.rows.last().map_or(0.0, |r| r.norm);
        let mut line = String::new();
        let _ = write!(
            line,
            "sup over Re(lambda) = 1 of the resolvent norm reaches {last} at k = {m} (sqrt(M_max) = {s}) and grows \
             without bound as M_max increases; on a Hilbert space the Gearhart-Pruss criterion then places e^(2*pi) \
             in the spectrum of e^(2*pi*D) although the line Re(lambda) = 1 misses the spectrum of D",
            m = self.m_max(),
            s = (self.m_max() as f64).sqrt()
        );
        table.interpretation = Some(line);
        table.violations = violations;
        Ok(table)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(with = "complex_pair")]
    pub lambda: Complex,
    pub norm: f64,
    pub attained: Attained,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub limit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub running_max: Option<f64>,
}

impl ScanRow {
    fn from_report(r: &ResolventReport) -> Self {
        ScanRow {
            lambda: r.lambda,
            norm: r.norm,
            attained: r.attained,
            certified: r.certified,
            limit: r.limit,
            running_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    #[serde(with = "complex_pair")]
    pub lambda: Complex,
    pub reason: String,
}

/// Resolvent norms on a set of `λ`, sorted by `Im λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    #[serde(rename = "M_max")]
    pub m_max: usize,
    pub grid: String,
    pub rows: Vec<ScanRow>,
    #[serde(default)]
    pub skipped: Vec<SkippedPoint>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretation: Option<String>,
}

impl ScanTable {
    fn new(m_max: usize, grid: String, mut rows: Vec<ScanRow>, skipped: Vec<SkippedPoint>) -> Self {
        rows.sort_by(|a, b| {
            a.lambda
                .im
                .total_cmp(&b.lambda.im)
                .then(a.lambda.re.total_cmp(&b.lambda.re))
        });
        ScanTable {
            m_max,
            grid,
            rows,
            skipped,
            notes: Vec::new(),
            violations: Vec::new(),
            interpretation: None,
        }
    }

    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified)
    }

    /// CSV with header `re,im,norm,attained_M,attained_n,certified`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.lambda.re, r.lambda.im, r.norm, r.attained.m, r.attained.n, r.certified
            );
        }
        out
    }
}
