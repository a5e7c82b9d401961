// SPDX-License-Identifier: Apache-2.0

//! Interchange formats shared by the reports and the command line.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializes a complex number as `[re, im]`.
pub mod complex_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::numlin::Complex;

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}

/// Vector-valued step function on `[0, 2π]`, extended 2π-periodically.
///
/// JSON: `{"breaks": [t_0, ..., t_m], "values": [[...], ...]}` with
/// `t_0 = 0`, `t_m = 2π`, strictly increasing breaks and one value vector per
/// interval `[t_j, t_{j+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr")]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct StepRepr {
    breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;

    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.breaks, r.values)
    }
}

const PERIOD_TOL: f64 = 1e-12;

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::InvalidArgument(format!(
                "step function needs m+1 breaks for m values, got {} breaks and {} values",
                breaks.len(),
                values.len()
            )));
        }
        if breaks[0].abs() > PERIOD_TOL || (breaks[breaks.len() - 1] - TAU).abs() > PERIOD_TOL {
            return Err(Error::InvalidArgument("breaks must start at 0 and end at 2*pi".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("breaks must be strictly increasing".into()));
        }
        let d = values[0].len();
        if d == 0 || values.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(
                "step values must share one nonzero length".into(),
            ));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("step function"));
        }
        let mut breaks = breaks;
        breaks[0] = 0.0;
        let last = breaks.len() - 1;
        breaks[last] = TAU;
        Ok(StepFunction { breaks, values })
    }

    /// Constant function on the whole period.
    pub fn constant(value: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0, TAU], vec![value])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// Value at `t`, reduced modulo 2π.
    pub fn eval(&self, t: f64) -> &[f64] {
        let r = t.rem_euclid(TAU);
        let idx = self.breaks[1..].partition_point(|&b| b <= r);
        &self.values[idx.min(self.values.len() - 1)]
    }
}
