//! `symphonic` — solve, cross-check, audit, and sweep reduction profiles.
//!
//! Exit codes: 0 success, 1 usage or invalid configuration, 2 numerical
//! failure (non-convergence, bracket failure), 3 cross-check failure.

mod commands;
mod io;
mod spec;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::spec::{RunSpec, SpecArgs};

#[derive(Parser)]
#[command(
    name = "symphonic",
    version,
    about = "Reduction-profile solver for symphonic joins and Hopf constructions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize the reduction functional; write <out>.profile.csv and <out>.report.json
    Solve {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Shoot the profile ODE, minimize independently, and cross-check the two curves
    Oracle {
        #[command(flatten)]
        spec: SpecArgs,
        /// Largest acceptable sup-difference between the two curves
        #[arg(long, default_value_t = 2e-2)]
        xcheck_tol: f64,
    },
    /// Evaluate the functional and strong-form residual of an exported profile CSV
    Residual {
        /// Profile CSV with header t,phi,phi_prime,residual
        profile: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Solve once per axis value (in parallel); write <out>.sweep.csv
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Config field to vary: m1, m2, a, b, c, d, norm1, norm2, r1 or r2
        #[arg(long)]
        axis: String,
        /// Explicit axis values, comma separated (at least 2)
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Start of a linear range (use with --hi and --count)
        #[arg(long)]
        lo: Option<f64>,
        /// End of a linear range
        #[arg(long)]
        hi: Option<f64>,
        /// Number of points in the linear range (at least 2)
        #[arg(long)]
        count: Option<usize>,
        /// Also run the shooting oracle per row and record s_star
        #[arg(long)]
        with_oracle: bool,
    },
}

fn layered(args: &SpecArgs) -> Result<RunSpec, i32> {
    RunSpec::layered(args).map_err(|m| commands::usage(&m))
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Solve { spec } => match layered(&spec) {
            Ok(s) => commands::cmd_solve(&s),
            Err(code) => code,
        },
        Cmd::Oracle { spec, xcheck_tol } => match layered(&spec) {
            Ok(s) => commands::cmd_oracle(&s, xcheck_tol),
            Err(code) => code,
        },
        Cmd::Residual { profile, spec } => match layered(&spec) {
            Ok(s) => commands::cmd_residual(&profile, &s),
            Err(code) => code,
        },
        Cmd::Sweep {
            spec,
            axis,
            values,
            lo,
            hi,
            count,
            with_oracle,
        } => match layered(&spec) {
            Ok(s) => commands::cmd_sweep(&s, &axis, values, lo, hi, count, with_oracle),
            Err(code) => code,
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => commands::EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}
