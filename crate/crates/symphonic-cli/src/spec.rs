//! Layered run configuration: built-in defaults, then `--config file.json`,
//! then explicit flags. Every effective value is echoed into reports so a
//! run can be reproduced from its own artifacts.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use symphonic_core::euler_lagrange::RESIDUAL_DELTA;
use symphonic_core::{make_grid, Grading, Grid, Init, Mode, ProblemConfig, ShootingOptions, SolverOptions};

/// The full, resolved parameter set for one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub mode: String,
    pub m1: u32,
    pub m2: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub norm1: f64,
    pub norm2: f64,
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
    pub grading: String,
    pub init: String,
    pub seed: u64,
    pub max_iters: u64,
    pub grad_tol: f64,
    pub step0: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub eps: f64,
    pub rk_steps: usize,
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub bisect_tol: f64,
    pub target_tol: f64,
    pub delta: f64,
    pub out: Option<String>,
}

impl Default for RunSpec {
    fn default() -> Self {
        let s = SolverOptions::default();
        let sh = ShootingOptions::default();
        RunSpec {
            mode: "join".into(),
            m1: 3,
            m2: 3,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
            norm1: 3.0,
            norm2: 3.0,
            r1: 1.0,
            r2: 1.0,
            n: 200,
            grading: "uniform".into(),
            init: "linear".into(),
            seed: s.seed,
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            step0: s.step0,
            backtrack: s.backtrack,
            armijo: s.armijo,
            eps: sh.eps,
            rk_steps: sh.rk_steps,
            slope_lo: sh.slope_lo,
            slope_hi: sh.slope_hi,
            bisect_tol: sh.bisect_tol,
            target_tol: sh.target_tol,
            delta: RESIDUAL_DELTA,
            out: None,
        }
    }
}

/// One optional override per RunSpec field; doubles as the clap flag set and
/// the `--config` JSON schema (unknown keys are rejected).
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecArgs {
    /// JSON file with RunSpec fields; explicit flags win over it
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// join or hopf [default: join]
    #[arg(long)]
    pub mode: Option<String>,
    /// First factor sphere dimension [default: 3]
    #[arg(long)]
    pub m1: Option<u32>,
    /// Second factor sphere dimension [default: 3]
    #[arg(long)]
    pub m2: Option<u32>,
    /// Domain semi-axis on the first factor [default: 1]
    #[arg(long)]
    pub a: Option<f64>,
    /// Domain semi-axis on the second factor [default: 1]
    #[arg(long)]
    pub b: Option<f64>,
    /// Target semi-axis on the first factor [default: 1]
    #[arg(long)]
    pub c: Option<f64>,
    /// Target semi-axis on the second factor [default: 1]
    #[arg(long)]
    pub d: Option<f64>,
    /// Squared eigenmap norm of the first factor map [default: 3]
    #[arg(long)]
    pub norm1: Option<f64>,
    /// Squared eigenmap norm of the second factor map [default: 3]
    #[arg(long)]
    pub norm2: Option<f64>,
    /// First factor radius (carried, does not enter the reduction) [default: 1]
    #[arg(long)]
    pub r1: Option<f64>,
    /// Second factor radius (carried, does not enter the reduction) [default: 1]
    #[arg(long)]
    pub r2: Option<f64>,
    /// Number of grid cells, at least 4 [default: 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid grading: "uniform" or "graded:<gamma>" with gamma >= 1 [default: uniform]
    #[arg(long)]
    pub grading: Option<String>,
    /// Initial profile: "linear" or "random" [default: linear]
    #[arg(long)]
    pub init: Option<String>,
    /// Seed for the random initial profile [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iteration cap for the minimizer [default: 50000]
    #[arg(long)]
    pub max_iters: Option<u64>,
    /// Projected-gradient stopping tolerance [default: 1e-8]
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// Initial trial step [default: 1]
    #[arg(long)]
    pub step0: Option<f64>,
    /// Backtracking factor in (0,1) [default: 0.5]
    #[arg(long)]
    pub backtrack: Option<f64>,
    /// Armijo sufficient-decrease constant in (0,1) [default: 1e-4]
    #[arg(long)]
    pub armijo: Option<f64>,
    /// Shooting collar width; integration runs on [eps, pi/2-eps] [default: 1e-3]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Runge-Kutta steps for one shot [default: 20000]
    #[arg(long)]
    pub rk_steps: Option<usize>,
    /// Lower end of the initial slope bracket [default: 1e-3]
    #[arg(long)]
    pub slope_lo: Option<f64>,
    /// Upper end of the initial slope bracket [default: 1e3]
    #[arg(long)]
    pub slope_hi: Option<f64>,
    /// Bisection bracket-width tolerance on the slope [default: 1e-10]
    #[arg(long)]
    pub bisect_tol: Option<f64>,
    /// Far-boundary hit tolerance [default: 1e-6]
    #[arg(long)]
    pub target_tol: Option<f64>,
    /// Margin excluded at both ends when reporting residual_sup [default: 0.05]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Output path prefix; writes <out>.profile.csv, <out>.report.json, <out>.sweep.csv
    #[arg(long)]
    pub out: Option<String>,
}

macro_rules! overlay {
    ($spec:ident, $patch:ident, $($field:ident),+) => {
        $(if let Some(v) = &$patch.$field { $spec.$field = v.clone(); })+
    };
}

impl RunSpec {
    /// defaults <- config file <- flags.
    pub fn layered(args: &SpecArgs) -> Result<RunSpec, String> {
        let mut spec = RunSpec::default();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let patch: SpecArgs =
                serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
            spec.apply(&patch);
        }
        spec.apply(args);
        Ok(spec)
    }

    fn apply(&mut self, p: &SpecArgs) {
        overlay!(self, p, mode, grading, init);
        overlay!(
            self, p, m1, m2, a, b, c, d, norm1, norm2, r1, r2, n, seed, max_iters, grad_tol,
            step0, backtrack, armijo, eps, rk_steps, slope_lo, slope_hi, bisect_tol, target_tol,
            delta
        );
        if p.out.is_some() {
            self.out = p.out.clone();
        }
    }

    pub fn problem_config(&self) -> Result<ProblemConfig, String> {
        let mode = match self.mode.as_str() {
            "join" => Mode::Join,
            "hopf" => Mode::Hopf,
            other => return Err(format!("unknown mode '{other}' (expected join or hopf)")),
        };
        let cfg = ProblemConfig {
            m1: self.m1,
            m2: self.m2,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
            norm1: self.norm1,
            norm2: self.norm2,
            r1: self.r1,
            r2: self.r2,
            mode,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid, String> {
        let grading = parse_grading(&self.grading)?;
        make_grid(self.n, grading).map_err(|e| e.to_string())
    }

    pub fn solver_options(&self) -> Result<SolverOptions, String> {
        let opts = SolverOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            step0: self.step0,
            backtrack: self.backtrack,
            armijo: self.armijo,
            seed: self.seed,
        };
        opts.validate().map_err(|e| e.to_string())?;
        Ok(opts)
    }

    pub fn shooting_options(&self) -> Result<ShootingOptions, String> {
        let opts = ShootingOptions {
            eps: self.eps,
            rk_steps: self.rk_steps,
            slope_lo: self.slope_lo,
            slope_hi: self.slope_hi,
            bisect_tol: self.bisect_tol,
            target_tol: self.target_tol,
        };
        opts.validate().map_err(|e| e.to_string())?;
        Ok(opts)
    }

    pub fn initial(&self) -> Result<Init, String> {
        match self.init.as_str() {
            "linear" => Ok(Init::Linear),
            "random" => Ok(Init::Random),
            other => Err(format!("unknown init '{other}' (expected linear or random)")),
        }
    }

    pub fn out_prefix(&self) -> Result<&str, String> {
        self.out.as_deref().ok_or_else(|| "--out is required".into())
    }
}

pub fn parse_grading(text: &str) -> Result<Grading, String> {
    if text == "uniform" {
        return Ok(Grading::Uniform);
    }
    if let Some(rest) = text.strip_prefix("graded:") {
        let gamma: f64 = rest
            .parse()
            .map_err(|_| format!("bad grading exponent '{rest}'"))?;
        return Ok(Grading::Graded(gamma));
    }
    Err(format!(
        "unknown grading '{text}' (expected uniform or graded:<gamma>)"
    ))
}
