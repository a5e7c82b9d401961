// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dichotomy_core::Complex;

#[derive(Parser, Debug)]
#[command(
    name = "dichotomy",
    version,
    about = "Certified resolvent norms and semigroup checks"
)]
pub struct Cli {
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file; relative paths resolve against DICHOTOMY_OUT_DIR when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, env = "DICHOTOMY_OUT_DIR", hide_env_values = true)]
    pub out_dir: Option<PathBuf>,

    /// Include the tolerances behind every verdict in the output.
    #[arg(long, global = true)]
    pub tol_report: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Resolvent norms of the shift block C_M against their closed-form bounds.
    Shift {
        #[arg(long = "m")]
        m: usize,
        /// Points `re,im`; defaults to 32 points on the unit circle.
        #[arg(long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Vec<Complex>,
    },
    /// Certified resolvent norms of B_M.
    Bm {
        #[arg(long = "m")]
        m: usize,
        /// Points `re,im`; defaults to 1 + iM and 64 points on Re λ = 1, |λ| ≤ M - 2.
        #[arg(long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Vec<Complex>,
        /// Also report ‖e^{tB_M}‖ at these times.
        #[arg(long = "t", allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Resolvent norms of the truncated direct sum on a grid.
    Dsum {
        #[arg(long = "m-max")]
        m_max: usize,
        /// Points `re,im`; defaults to a grid on Re λ ∈ {-1, 1, 2, 6}, Im λ ∈ [-8, 8].
        #[arg(long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Vec<Complex>,
    },
    /// Resolvent norms along 1 + ik, k = 1..M_max.
    Counterexample {
        #[arg(long = "m-max", default_value_t = 64)]
        m_max: usize,
    },
    /// Seeded suite for the lattice p-sum inequality.
    Krivine {
        #[arg(long, default_value_t = 500)]
        trials: u64,
    },
    /// Seeded suite for the integral Minkowski inequality.
    Minkowski {
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Laplace representation of the resolvent.
    Laplace {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<Complex>,
        /// Nonnegative vector `g`, comma separated; defaults to all ones.
        #[arg(long, value_delimiter = ',')]
        g: Vec<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
    },
    /// Convolution inequality for a step-function forcing.
    Convolution {
        #[command(flatten)]
        input: MatrixInput,
        /// Step function JSON `{"breaks": [...], "values": [[...], ...]}`.
        #[arg(long)]
        step: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 32)]
        panels: usize,
    },
    /// Hyperbolicity constant for periodic forcing.
    Hyperbolicity {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value_t = 25)]
        trials: u64,
        #[arg(long, default_value_t = 32)]
        n_modes: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Periodic-rule points; defaults to 8·n_modes.
        #[arg(long)]
        quad: Option<usize>,
        /// Random coefficient families per matrix.
        #[arg(long, default_value_t = 16)]
        families: u64,
    },
    /// Tail slope of log‖e^{tA}‖ against the spectral bound.
    Growth {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

/// A generator from a JSON file; without one the command runs its seeded suite.
#[derive(Args, Debug)]
pub struct MatrixInput {
    /// Matrix JSON `{"rows": n, "cols": n, "entries": [[re, im], ...]}`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid number '{x}' in '{s}'"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex::new(parse(re)?, parse(im)?)),
        None => Ok(Complex::new(parse(s)?, 0.0)),
    }
}
