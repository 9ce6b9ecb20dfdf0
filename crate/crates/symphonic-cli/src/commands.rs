//! The four subcommands. Each returns a process exit code: 0 success,
//! 1 usage/config error, 2 numerical failure, 3 cross-check failure.

use std::path::{Path, PathBuf};

use serde_json::Value;
use symphonic_core::euler_lagrange::residual_sup;
use symphonic_core::functional::evaluate_j;
use symphonic_core::shooting::{compare, shoot};
use symphonic_core::solver::minimize;
use symphonic_core::{CoefficientSet, Trajectory};

use crate::io::{json_num, read_profile_csv, write_profile_csv, write_report_json};
use crate::spec::RunSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_XCHECK: i32 = 3;

pub fn usage(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    eprintln!("run `symphonic --help` for usage");
    EXIT_USAGE
}

fn numerical(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_NUMERICAL
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// The spec serialized to a flat JSON object: the config echo every report
/// starts from.
fn spec_echo(spec: &RunSpec) -> serde_json::Map<String, Value> {
    match serde_json::to_value(spec) {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("RunSpec serializes to an object"),
    }
}

fn float_array(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(json_num).collect())
}

pub fn cmd_solve(spec: &RunSpec) -> i32 {
    let cfg = match spec.problem_config() {
        Ok(c) => c,
        Err(m) => return usage(&m),
    };
    let grid = match spec.grid() {
        Ok(g) => g,
        Err(m) => return usage(&m),
    };
    let opts = match spec.solver_options() {
        Ok(o) => o,
        Err(m) => return usage(&m),
    };
    let init = match spec.initial() {
        Ok(i) => i,
        Err(m) => return usage(&m),
    };
    let out = match spec.out_prefix() {
        Ok(o) => o.to_string(),
        Err(m) => return usage(&m),
    };
    if !(spec.delta >= 0.0 && spec.delta.is_finite()) {
        return usage("--delta must be a finite non-negative number");
    }

    let mut report = match minimize(&cfg, &grid, init, &opts) {
        Ok(r) => r,
        Err(e) => return numerical(&e.to_string()),
    };
    report.residual_sup = residual_sup(&report.profile, &cfg, spec.delta).unwrap_or(f64::NAN);

    let csv_path = PathBuf::from(format!("{out}.profile.csv"));
    let json_path = PathBuf::from(format!("{out}.report.json"));
    if let Err(m) = write_profile_csv(&csv_path, &report.profile, &cfg) {
        return usage(&m);
    }
    let mut obj = spec_echo(spec);
    obj.insert("j_value".into(), json_num(report.j_value));
    obj.insert("iterations".into(), report.iterations.into());
    obj.insert("converged".into(), report.converged.into());
    obj.insert(
        "projected_grad_norm".into(),
        json_num(report.projected_grad_norm),
    );
    obj.insert("residual_sup".into(), json_num(report.residual_sup));
    if let Err(m) = write_report_json(&json_path, &Value::Object(obj)) {
        return usage(&m);
    }

    println!(
        "solve: j_value = {}  iterations = {}  converged = {}  residual_sup = {}  -> {}, {}",
        fmt(report.j_value),
        report.iterations,
        report.converged,
        fmt(report.residual_sup),
        csv_path.display(),
        json_path.display()
    );
    if report.converged {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}

/// Deterministic thinning of a trajectory to at most ~2000 rows for the
/// report; always keeps the last state.
fn thin_trajectory(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    let len = traj.states.len();
    let stride = len.div_ceil(2000).max(1);
    let mut ts = Vec::new();
    let mut phis = Vec::new();
    for (i, st) in traj.states.iter().enumerate() {
        if i % stride == 0 || i == len - 1 {
            ts.push(st.t);
            phis.push(st.phi);
        }
    }
    (ts, phis)
}

pub fn cmd_oracle(spec: &RunSpec, xcheck_tol: f64) -> i32 {
    let cfg = match spec.problem_config() {
        Ok(c) => c,
        Err(m) => return usage(&m),
    };
    let grid = match spec.grid() {
        Ok(g) => g,
        Err(m) => return usage(&m),
    };
    let opts = match spec.solver_options() {
        Ok(o) => o,
        Err(m) => return usage(&m),
    };
    let sopts = match spec.shooting_options() {
        Ok(o) => o,
        Err(m) => return usage(&m),
    };
    let init = match spec.initial() {
        Ok(i) => i,
        Err(m) => return usage(&m),
    };
    let out = match spec.out_prefix() {
        Ok(o) => o.to_string(),
        Err(m) => return usage(&m),
    };
    if !(xcheck_tol > 0.0) || !xcheck_tol.is_finite() {
        return usage("--xcheck-tol must be a positive finite number");
    }

    let shot = match shoot(&cfg, &sopts) {
        Ok(o) => o,
        Err(e) => return numerical(&e.to_string()),
    };
    let report = match minimize(&cfg, &grid, init, &opts) {
        Ok(r) => r,
        Err(e) => return numerical(&e.to_string()),
    };
    let sup_diff = compare(&report, &shot.trajectory);

    let mut obj = spec_echo(spec);
    obj.insert("xcheck_tol".into(), json_num(xcheck_tol));
    obj.insert("s_star".into(), json_num(shot.s_star));
    obj.insert("hit".into(), json_num(shot.trajectory.hit));
    obj.insert("blown_up".into(), shot.trajectory.blown_up.into());
    obj.insert("non_monotone".into(), shot.non_monotone.into());
    obj.insert("sup_diff".into(), json_num(sup_diff));
    obj.insert("j_value".into(), json_num(report.j_value));
    obj.insert("iterations".into(), report.iterations.into());
    obj.insert("converged".into(), report.converged.into());
    obj.insert(
        "minimizer_t".into(),
        float_array(report.profile.grid().nodes().iter().copied()),
    );
    obj.insert(
        "minimizer_phi".into(),
        float_array(report.profile.values().iter().copied()),
    );
    let (shot_t, shot_phi) = thin_trajectory(&shot.trajectory);
    obj.insert("shot_t".into(), float_array(shot_t));
    obj.insert("shot_phi".into(), float_array(shot_phi));

    let json_path = PathBuf::from(format!("{out}.report.json"));
    if let Err(m) = write_report_json(&json_path, &Value::Object(obj)) {
        return usage(&m);
    }

    println!(
        "oracle: s_star = {}  sup_diff = {}  xcheck_tol = {:e}  converged = {}  -> {}",
        fmt(shot.s_star),
        fmt(sup_diff),
        xcheck_tol,
        report.converged,
        json_path.display()
    );
    if sup_diff.is_finite() && sup_diff < xcheck_tol {
        EXIT_OK
    } else {
        eprintln!(
            "error: cross-check failed: sup-difference {} is not below {:e}",
            fmt(sup_diff),
            xcheck_tol
        );
        EXIT_XCHECK
    }
}

pub fn cmd_residual(profile: &Path, spec: &RunSpec) -> i32 {
    let cfg = match spec.problem_config() {
        Ok(c) => c,
        Err(m) => return usage(&m),
    };
    if !(spec.delta >= 0.0 && spec.delta.is_finite()) {
        return usage("--delta must be a finite non-negative number");
    }
    let p = match read_profile_csv(profile) {
        Ok(p) => p,
        Err(m) => return usage(&m),
    };
    let coeffs = match CoefficientSet::for_config(&cfg) {
        Ok(c) => c,
        Err(e) => return usage(&e.to_string()),
    };
    let j = evaluate_j(&p, &coeffs);
    let sup = match residual_sup(&p, &cfg, spec.delta) {
        Ok(s) => s,
        Err(e) => return numerical(&e.to_string()),
    };
    println!(
        "residual: n = {}  j_value = {}  residual_sup = {}  delta = {:e}",
        p.grid().nodes().len() - 1,
        fmt(j),
        fmt(sup),
        spec.delta
    );
    EXIT_OK
}

/// One summary row of a sweep.
struct SweepRow {
    axis_value: f64,
    j_value: f64,
    residual_sup: f64,
    converged: bool,
    s_star: f64,
}

const NUMERIC_AXES: [&str; 10] = [
    "m1", "m2", "a", "b", "c", "d", "norm1", "norm2", "r1", "r2",
];

fn set_axis(spec: &mut RunSpec, axis: &str, value: f64) -> Result<(), String> {
    match axis {
        "m1" | "m2" => {
            if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                return Err(format!("axis {axis} needs a non-negative integer, got {value}"));
            }
            if axis == "m1" {
                spec.m1 = value as u32;
            } else {
                spec.m2 = value as u32;
            }
        }
        "a" => spec.a = value,
        "b" => spec.b = value,
        "c" => spec.c = value,
        "d" => spec.d = value,
        "norm1" => spec.norm1 = value,
        "norm2" => spec.norm2 = value,
        "r1" => spec.r1 = value,
        "r2" => spec.r2 = value,
        other => {
            return Err(format!(
                "axis '{other}' is not a numeric config field (expected one of {})",
                NUMERIC_AXES.join(", ")
            ))
        }
    }
    Ok(())
}

fn run_row(base: &RunSpec, axis: &str, value: f64, with_oracle: bool) -> SweepRow {
    let mut row = SweepRow {
        axis_value: value,
        j_value: f64::NAN,
        residual_sup: f64::NAN,
        converged: false,
        s_star: f64::NAN,
    };
    let mut spec = base.clone();
    if set_axis(&mut spec, axis, value).is_err() {
        return row;
    }
    let (Ok(cfg), Ok(grid), Ok(opts), Ok(init)) = (
        spec.problem_config(),
        spec.grid(),
        spec.solver_options(),
        spec.initial(),
    ) else {
        return row;
    };
    let Ok(report) = minimize(&cfg, &grid, init, &opts) else {
        return row;
    };
    row.j_value = report.j_value;
    row.residual_sup = residual_sup(&report.profile, &cfg, spec.delta).unwrap_or(f64::NAN);
    row.converged = report.converged;
    if with_oracle {
        if let (Ok(sopts), true) = (spec.shooting_options(), report.converged) {
            row.s_star = shoot(&cfg, &sopts).map_or(f64::NAN, |o| o.s_star);
        }
    }
    row
}

/// Thread count for the sweep pool: the smaller of SYMPHONIC_THREADS (when
/// set and valid) and the number of rows.
fn sweep_threads(rows: usize) -> usize {
    let cap = std::env::var("SYMPHONIC_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&x| x >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |p| p.get())
        });
    cap.min(rows).max(1)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    base: &RunSpec,
    axis: &str,
    values: Option<Vec<f64>>,
    lo: Option<f64>,
    hi: Option<f64>,
    count: Option<usize>,
    with_oracle: bool,
) -> i32 {
    let out = match base.out_prefix() {
        Ok(o) => o.to_string(),
        Err(m) => return usage(&m),
    };
    if !NUMERIC_AXES.contains(&axis) {
        return usage(&format!(
            "axis '{axis}' is not a numeric config field (expected one of {})",
            NUMERIC_AXES.join(", ")
        ));
    }
    let vals: Vec<f64> = match (values, lo, hi, count) {
        (Some(v), None, None, None) => {
            if v.len() < 2 {
                return usage("--values needs at least 2 entries");
            }
            v
        }
        (None, Some(lo), Some(hi), Some(count)) => {
            if count < 2 {
                return usage("--count must be at least 2");
            }
            if !(lo.is_finite() && hi.is_finite()) {
                return usage("--lo and --hi must be finite");
            }
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect()
        }
        _ => {
            return usage(
                "give either --values v1,v2,... or all of --lo, --hi, --count",
            )
        }
    };
    if vals.iter().any(|v| !v.is_finite()) {
        return usage("axis values must be finite");
    }
    // Integer axes are checked up front so a typo fails the whole sweep
    // rather than producing a silent row of NaNs.
    if axis == "m1" || axis == "m2" {
        if let Some(bad) = vals.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
            return usage(&format!("axis {axis} needs non-negative integers, got {bad}"));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads(vals.len()))
        .build();
    let rows: Vec<SweepRow> = match pool {
        Ok(pool) => pool.install(|| {
            use rayon::prelude::*;
            vals.par_iter()
                .map(|&v| run_row(base, axis, v, with_oracle))
                .collect()
        }),
        Err(_) => vals.iter().map(|&v| run_row(base, axis, v, with_oracle)).collect(),
    };

    let csv_path = PathBuf::from(format!("{out}.sweep.csv"));
    let mut text = String::from("axis_value,j_value,residual_sup,converged");
    if with_oracle {
        text.push_str(",s_star");
    }
    text.push('\n');
    for row in &rows {
        text.push_str(&format!(
            "{},{},{},{}",
            fmt(row.axis_value),
            fmt(row.j_value),
            fmt(row.residual_sup),
            row.converged
        ));
        if with_oracle {
            text.push_str(&format!(",{}", fmt(row.s_star)));
        }
        text.push('\n');
    }
    if let Err(e) = std::fs::write(&csv_path, text) {
        return usage(&format!("cannot write {}: {e}", csv_path.display()));
    }

    let ok = rows.iter().filter(|r| r.converged).count();
    println!(
        "sweep: axis = {axis}  rows = {}  converged = {ok}/{}  -> {}",
        rows.len(),
        rows.len(),
        csv_path.display()
    );
    if ok == rows.len() {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}
