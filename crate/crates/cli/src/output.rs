// SPDX-License-Identifier: Apache-2.0

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::args::{Cli, Format};

/// Everything a subcommand produces.
pub struct Output {
    pub command: &'static str,
    pub result: Value,
    pub csv: String,
    pub verdict: String,
    /// Machine-readable record of the failed bound, if any.
    pub violation: Option<Value>,
    pub tolerances: Value,
}

pub fn csv<R: IntoIterator<Item = Vec<String>>>(header: &str, rows: R) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Rust's shortest round-trip float formatting, independent of locale.
pub fn num(x: impl Display) -> String {
    x.to_string()
}

/// Floats in plain decimal inside `[1e-4, 1e16)`, scientific otherwise.
pub fn fnum(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(fnum).unwrap_or_default()
}

fn target(cli: &Cli) -> Option<PathBuf> {
    let out = cli.out.as_ref()?;
    match &cli.out_dir {
        Some(dir) if out.is_relative() => Some(dir.join(out)),
        _ => Some(out.clone()),
    }
}

pub fn emit(cli: &Cli, out: &Output) -> Result<(), String> {
    let body = match cli.format {
        Format::Csv => out.csv.clone(),
        Format::Json => {
            let mut doc = json!({
                "command": out.command,
                "seed": cli.seed,
                "result": out.result,
                "verdict": out.verdict,
            });
            if cli.tol_report {
                doc["tolerances"] = out.tolerances.clone();
            }
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
    };
    match target(cli) {
        Some(path) => std::fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))?;
        }
    }
    eprintln!("{}: {}", out.command, out.verdict);
    if cli.tol_report && cli.format == Format::Csv {
        eprintln!("tolerances: {}", out.tolerances);
    }
    if let Some(v) = &out.violation {
        eprintln!(
            "{}",
            json!({ "violation": v, "command": out.command, "seed": cli.seed })
        );
    }
    Ok(())
}
