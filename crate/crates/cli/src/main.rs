// SPDX-License-Identifier: Apache-2.0

//! `dichotomy`: command-line front end for the resolvent, semigroup and
//! inequality checks in `dichotomy-core`.
//!
//! Exit status is 0 when every asserted bound holds, 1 when one fails (a
//! JSON violation record goes to stderr) and 2 on usage or input errors.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap maps usage errors to 2 and --help/--version to 0
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::dispatch(&cli) {
        Ok(out) => match output::emit(&cli, &out) {
            Ok(()) if out.violation.is_some() => ExitCode::from(1),
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
