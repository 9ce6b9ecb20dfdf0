//! Artifact I/O. All floats are printed with 17 significant digits so that
//! parsing an exported file reproduces the original doubles bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use symphonic_core::euler_lagrange::residual;
use symphonic_core::{Grid, Profile, ProblemConfig, HALF_PI};

pub const CSV_HEADER: &str = "t,phi,phi_prime,residual";

/// How far a hand-written endpoint may sit from the exact pin.
const ENDPOINT_SNAP: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `<path>` with columns t, phi, phi_prime, residual. The derivative is
/// the centered difference (one-sided at the ends); the residual column holds
/// the strong-form residual at interior nodes and NaN at the pinned ends.
pub fn write_profile_csv(path: &Path, p: &Profile, cfg: &ProblemConfig) -> Result<(), String> {
    let nodes = p.grid().nodes();
    let values = p.values();
    let last = nodes.len() - 1;
    let res = residual(p, cfg).ok();

    let file = File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut put = |line: String| {
        writeln!(w, "{line}").map_err(|e| format!("cannot write {}: {e}", path.display()))
    };
    put(CSV_HEADER.to_string())?;
    for i in 0..=last {
        let dphi = if i == 0 {
            (values[1] - values[0]) / (nodes[1] - nodes[0])
        } else if i == last {
            (values[last] - values[last - 1]) / (nodes[last] - nodes[last - 1])
        } else {
            (values[i + 1] - values[i - 1]) / (nodes[i + 1] - nodes[i - 1])
        };
        let r = if i == 0 || i == last {
            f64::NAN
        } else {
            res.as_ref().map_or(f64::NAN, |v| v[i - 1])
        };
        put(format!(
            "{},{},{},{}",
            fmt(nodes[i]),
            fmt(values[i]),
            fmt(dphi),
            fmt(r)
        ))?;
    }
    w.flush()
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Read a profile back from CSV: exact header, strictly increasing t, both
/// endpoints within 1e-9 of their pins (then snapped), values in the box.
pub fn read_profile_csv(path: &Path) -> Result<Profile, String> {
    let file = File::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| format!("{}: empty file", path.display()))?
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if header.trim_end() != CSV_HEADER {
        return Err(format!(
            "{}: bad header '{}' (expected '{CSV_HEADER}')",
            path.display(),
            header.trim_end()
        ));
    }

    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| format!("{}: {e}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: f64 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| format!("{}: bad t on data line {}", path.display(), lineno + 1))?;
        let phi: f64 = fields
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| format!("{}: bad phi on data line {}", path.display(), lineno + 1))?;
        if !t.is_finite() || !phi.is_finite() {
            return Err(format!(
                "{}: non-finite t or phi on data line {}",
                path.display(),
                lineno + 1
            ));
        }
        nodes.push(t);
        values.push(phi);
    }
    if nodes.len() < 5 {
        return Err(format!("{}: need at least 5 rows", path.display()));
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(format!("{}: t column is not strictly increasing", path.display()));
    }

    let last = nodes.len() - 1;
    for (what, got, want) in [
        ("t[0]", nodes[0], 0.0),
        ("t[last]", nodes[last], HALF_PI),
        ("phi[0]", values[0], 0.0),
        ("phi[last]", values[last], HALF_PI),
    ] {
        if (got - want).abs() > ENDPOINT_SNAP {
            return Err(format!(
                "{}: {what} = {got:.3e} is not pinned to {want:.16e}",
                path.display()
            ));
        }
    }
    nodes[0] = 0.0;
    nodes[last] = HALF_PI;
    values[0] = 0.0;
    values[last] = HALF_PI;

    let grid = Grid::from_nodes(nodes).map_err(|e| e.to_string())?;
    Profile::new(grid, values).map_err(|e| e.to_string())
}

/// Pretty JSON with a trailing newline. serde_json's map is ordered, so the
/// bytes are a pure function of the content.
pub fn write_report_json(path: &Path, report: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| format!("cannot serialize report: {e}"))?;
    std::fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// A JSON number, or null when the value is not finite (JSON has no NaN).
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}
