//! The reduction functional
//!
//!   J(φ) = ∫₀^{π/2} [ k⁴(φ)/h⁴(t) · φ′⁴ + potential(t, φ) ] · cos^{m₁}t sin^{m₂}t dt
//!
//! discretized by the midpoint rule on P1 profiles, together with its exact
//! discrete gradient and the W^{1,4}-type norm diagnostics.
//!
//! The midpoint rule never touches the endpoint singularities of the
//! potential, and per-cell constant slopes make the discrete gradient exact.

use crate::error::{Error, Result};
use crate::geometry::{h_raw, k_prime_raw, k_raw, weight_raw, Mode, ProblemConfig};
use crate::grid::{Grid, HALF_PI};

/// A discretized candidate profile φ on a grid, endpoints pinned to 0 and π/2.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    values: Vec<f64>,
}

impl Profile {
    /// Full feasibility: matching length, pinned endpoints, box constraint.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::InvalidInit(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.nodes().len()
            )));
        }
        if values[0] != 0.0 || *values.last().unwrap() != HALF_PI {
            return Err(Error::InvalidInit("endpoints must be pinned to 0 and pi/2 exactly".into()));
        }
        if !values.iter().all(|v| (0.0..=HALF_PI).contains(v)) {
            return Err(Error::InvalidInit("values must lie in [0, pi/2]".into()));
        }
        Ok(Profile { grid, values })
    }

    /// Relaxed constructor for norm diagnostics: finite values only, no
    /// pinning or box requirement.
    pub fn unpinned(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::InvalidInit(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.nodes().len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInit("values must be finite".into()));
        }
        Ok(Profile { grid, values })
    }

    /// The linear profile φ(t) = t.
    pub fn linear(grid: Grid) -> Self {
        let values = grid.nodes().to_vec();
        Profile { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_feasible(&self) -> bool {
        self.values[0] == 0.0
            && *self.values.last().unwrap() == HALF_PI
            && self.values.iter().all(|v| (0.0..=HALF_PI).contains(v))
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        Profile { grid, values }
    }
}

/// The derived potential constants of the functional.
///
/// Join mode: a₁ = (c⁴/a⁴)·norm1, a₂ = (d⁴/b⁴)·norm2.
/// Hopf mode: a₁ = (c⁴/a⁴)·norm1, a₂ = (c⁴/b⁴)·norm2.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub a1: f64,
    pub a2: f64,
    pub cfg: ProblemConfig,
}

impl CoefficientSet {
    pub fn for_config(cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let c4 = cfg.c.powi(4);
        let a1 = c4 / cfg.a.powi(4) * cfg.norm1;
        let a2 = match cfg.mode {
            Mode::Join => cfg.d.powi(4) / cfg.b.powi(4) * cfg.norm2,
            Mode::Hopf => c4 / cfg.b.powi(4) * cfg.norm2,
        };
        Ok(CoefficientSet { a1, a2, cfg: cfg.clone() })
    }
}

/// Potential part of the integrand at interior t.
///
/// Join: a₁ cos⁴φ/cos⁴t + a₂ sin⁴φ/sin⁴t.
/// Hopf: a₁ cos⁴φ/cos⁴t + a₂ cos⁴φ/sin⁴t (cos⁴φ in both terms, so that the
/// forced boundary behavior matches the first-order form).
pub fn potential(t: f64, phi: f64, coeffs: &CoefficientSet) -> Result<f64> {
    let t = crate::geometry::clamp_angle(t)?;
    if t == 0.0 || t == HALF_PI {
        return Err(Error::Singular { t, what: "potential has cos^-4 t and sin^-4 t factors" });
    }
    let (st, ct) = t.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(potential_kernel(
        1.0 / (ct * ct * ct * ct),
        1.0 / (st * st * st * st),
        sp,
        cp,
        coeffs,
    ))
}

#[inline]
fn potential_kernel(inv_cos4: f64, inv_sin4: f64, sp: f64, cp: f64, coeffs: &CoefficientSet) -> f64 {
    let cp4 = cp * cp * cp * cp;
    match coeffs.cfg.mode {
        Mode::Join => {
            let sp4 = sp * sp * sp * sp;
            coeffs.a1 * cp4 * inv_cos4 + coeffs.a2 * sp4 * inv_sin4
        }
        Mode::Hopf => (coeffs.a1 * inv_cos4 + coeffs.a2 * inv_sin4) * cp4,
    }
}

/// d(potential)/dφ at interior t.
#[inline]
pub(crate) fn potential_dphi_kernel(
    inv_cos4: f64,
    inv_sin4: f64,
    sp: f64,
    cp: f64,
    coeffs: &CoefficientSet,
) -> f64 {
    let cp3s = cp * cp * cp * sp;
    match coeffs.cfg.mode {
        Mode::Join => {
            let sp3c = sp * sp * sp * cp;
            -4.0 * coeffs.a1 * cp3s * inv_cos4 + 4.0 * coeffs.a2 * sp3c * inv_sin4
        }
        Mode::Hopf => -4.0 * (coeffs.a1 * inv_cos4 + coeffs.a2 * inv_sin4) * cp3s,
    }
}

/// Profile-independent per-cell quadrature data, shared by the evaluator,
/// the gradient, and the solver's inner loop.
#[derive(Debug, Clone)]
pub(crate) struct CellTables {
    pub dt: Vec<f64>,
    /// weight(tm) · dt
    pub wdt: Vec<f64>,
    pub inv_h4: Vec<f64>,
    pub inv_cos4: Vec<f64>,
    pub inv_sin4: Vec<f64>,
}

impl CellTables {
    pub(crate) fn build(grid: &Grid, cfg: &ProblemConfig) -> Self {
        let nodes = grid.nodes();
        let n = grid.n();
        let mut dt = Vec::with_capacity(n);
        let mut wdt = Vec::with_capacity(n);
        let mut inv_h4 = Vec::with_capacity(n);
        let mut inv_cos4 = Vec::with_capacity(n);
        let mut inv_sin4 = Vec::with_capacity(n);
        for i in 0..n {
            let w = nodes[i + 1] - nodes[i];
            let tm = 0.5 * (nodes[i] + nodes[i + 1]);
            let (st, ct) = tm.sin_cos();
            let h = h_raw(tm, cfg);
            dt.push(w);
            wdt.push(weight_raw(tm, cfg) * w);
            inv_h4.push(1.0 / (h * h * h * h));
            inv_cos4.push(1.0 / (ct * ct * ct * ct));
            inv_sin4.push(1.0 / (st * st * st * st));
        }
        CellTables { dt, wdt, inv_h4, inv_cos4, inv_sin4 }
    }
}

pub(crate) fn j_value_kernel(values: &[f64], t: &CellTables, coeffs: &CoefficientSet) -> f64 {
    let cfg = &coeffs.cfg;
    let mut j = 0.0;
    for i in 0..t.dt.len() {
        let pm = 0.5 * (values[i] + values[i + 1]);
        let s = (values[i + 1] - values[i]) / t.dt[i];
        let (sp, cp) = pm.sin_cos();
        let kv = k_raw(pm, cfg);
        let k4 = kv * kv * kv * kv;
        let s2 = s * s;
        let quartic = k4 * t.inv_h4[i] * s2 * s2;
        let pot = potential_kernel(t.inv_cos4[i], t.inv_sin4[i], sp, cp, coeffs);
        j += (quartic + pot) * t.wdt[i];
    }
    j
}

/// Accumulate the exact gradient of the discrete J into `grad` (length n−1,
/// interior nodes only: endpoints are pinned).
pub(crate) fn j_grad_kernel(values: &[f64], t: &CellTables, coeffs: &CoefficientSet, grad: &mut [f64]) {
    let cfg = &coeffs.cfg;
    let ncell = t.dt.len();
    debug_assert_eq!(grad.len(), ncell - 1);
    for g in grad.iter_mut() {
        *g = 0.0;
    }
    for i in 0..ncell {
        let pm = 0.5 * (values[i] + values[i + 1]);
        let s = (values[i + 1] - values[i]) / t.dt[i];
        let (sp, cp) = pm.sin_cos();
        let kv = k_raw(pm, cfg);
        let kp = k_prime_raw(pm, cfg);
        let k3 = kv * kv * kv;
        let s2 = s * s;
        let s3 = s2 * s;
        // dI/ds and dI/dpm of the cell integrand I = k⁴/h⁴ s⁴ + pot
        let di_ds = 4.0 * k3 * kv * t.inv_h4[i] * s3;
        let di_dpm = 4.0 * k3 * kp * t.inv_h4[i] * s2 * s2
            + potential_dphi_kernel(t.inv_cos4[i], t.inv_sin4[i], sp, cp, coeffs);
        // φ_i enters through pm (weight 1/2) and through s (∓1/dt)
        let common = t.wdt[i];
        if i >= 1 {
            grad[i - 1] += (0.5 * di_dpm - di_ds / t.dt[i]) * common;
        }
        if i + 1 <= ncell - 1 {
            grad[i] += (0.5 * di_dpm + di_ds / t.dt[i]) * common;
        }
    }
}

/// Midpoint-rule value of the discrete functional J.
pub fn evaluate_j(p: &Profile, coeffs: &CoefficientSet) -> f64 {
    debug_assert!(p.is_feasible(), "evaluate_j expects a feasible profile");
    let tables = CellTables::build(p.grid(), &coeffs.cfg);
    j_value_kernel(p.values(), &tables, coeffs)
}

/// Exact partial derivatives ∂J/∂φᵢ at the n−1 interior nodes.
pub fn grad_j(p: &Profile, coeffs: &CoefficientSet) -> Vec<f64> {
    debug_assert!(p.is_feasible(), "grad_j expects a feasible profile");
    let tables = CellTables::build(p.grid(), &coeffs.cfg);
    let mut grad = vec![0.0; p.grid().n() - 1];
    j_grad_kernel(p.values(), &tables, coeffs, &mut grad);
    grad
}

/// Midpoint-rule value of ∫ (φ′⁴ + φ⁴) v(t) dt for a caller-supplied weight.
pub fn x_norm(p: &Profile, v_weight: impl Fn(f64) -> f64) -> f64 {
    let nodes = p.grid().nodes();
    let values = p.values();
    let mut acc = 0.0;
    for i in 0..p.grid().n() {
        let dt = nodes[i + 1] - nodes[i];
        let tm = 0.5 * (nodes[i] + nodes[i + 1]);
        let pm = 0.5 * (values[i] + values[i + 1]);
        let s = (values[i + 1] - values[i]) / dt;
        let s4 = s * s * s * s;
        let p4 = pm * pm * pm * pm;
        acc += (s4 + p4) * v_weight(tm) * dt;
    }
    acc
}

/// Empirical Hardy/Sobolev ratio: max of
/// ∫φ⁴ sin^{m₂−4}t cos^{m₁}t dt and ∫φ⁴ cos^{m₁−4}t sin^{m₂}t dt, over
/// ∫(φ′⁴+φ⁴) sin^{m₂}t cos^{m₁}t dt — a boundedness diagnostic only.
pub fn hardy_ratio(p: &Profile, cfg: &ProblemConfig) -> f64 {
    let nodes = p.grid().nodes();
    let values = p.values();
    let (m1, m2) = (cfg.m1 as i32, cfg.m2 as i32);
    let mut num_sin = 0.0;
    let mut num_cos = 0.0;
    let mut den = 0.0;
    for i in 0..p.grid().n() {
        let dt = nodes[i + 1] - nodes[i];
        let tm = 0.5 * (nodes[i] + nodes[i + 1]);
        let pm = 0.5 * (values[i] + values[i + 1]);
        let s = (values[i + 1] - values[i]) / dt;
        let (st, ct) = tm.sin_cos();
        let p4 = pm * pm * pm * pm;
        let s4 = s * s * s * s;
        num_sin += p4 * st.powi(m2 - 4) * ct.powi(m1) * dt;
        num_cos += p4 * ct.powi(m1 - 4) * st.powi(m2) * dt;
        den += (s4 + p4) * st.powi(m2) * ct.powi(m1) * dt;
    }
    let num = num_sin.max(num_cos);
    if num == 0.0 {
        return 0.0;
    }
    num / den
}

/// Swap the two factors of a join configuration:
/// (m₁,a,norm1,c) ↔ (m₂,b,norm2,d), with r₁ ↔ r₂.
pub fn reflect_config(cfg: &ProblemConfig) -> ProblemConfig {
    ProblemConfig {
        m1: cfg.m2,
        m2: cfg.m1,
        a: cfg.b,
        b: cfg.a,
        c: cfg.d,
        d: cfg.c,
        norm1: cfg.norm2,
        norm2: cfg.norm1,
        r1: cfg.r2,
        r2: cfg.r1,
        mode: cfg.mode,
    }
}

/// Reflect a profile: φ̃(t) = π/2 − φ(π/2 − t) on the reflected grid.
pub fn reflect_profile(p: &Profile) -> Profile {
    let nodes: Vec<f64> = p.grid().nodes().iter().rev().map(|t| HALF_PI - t).collect();
    let values: Vec<f64> = p.values().iter().rev().map(|v| HALF_PI - v).collect();
    let grid = Grid::from_nodes(nodes).expect("reflection preserves grid validity");
    Profile { grid, values }
}

/// Piecewise-linear interpolation of a profile onto another grid, with the
/// box and endpoint pins re-applied. Handy for warm-starting a fine solve
/// from a coarse minimizer.
pub fn resample(p: &Profile, grid: Grid) -> Profile {
    let src_t = p.grid().nodes();
    let src_v = p.values();
    let mut values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| {
            let j = src_t.partition_point(|&x| x <= t).clamp(1, src_t.len() - 1);
            let (t0, t1) = (src_t[j - 1], src_t[j]);
            let (v0, v1) = (src_v[j - 1], src_v[j]);
            (v0 + (t - t0) / (t1 - t0) * (v1 - v0)).clamp(0.0, HALF_PI)
        })
        .collect();
    values[0] = 0.0;
    let n = values.len();
    values[n - 1] = HALF_PI;
    Profile { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grading};
    use approx::assert_relative_eq;

    fn sphere_cfg(m: u32, norm: f64) -> ProblemConfig {
        ProblemConfig {
            m1: m,
            m2: m,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
            norm1: norm,
            norm2: norm,
            r1: 1.0,
            r2: 1.0,
            mode: Mode::Join,
        }
    }

    fn asym_cfg() -> ProblemConfig {
        ProblemConfig {
            m1: 3,
            m2: 4,
            a: 1.0,
            b: 1.2,
            c: 1.0,
            d: 0.8,
            norm1: 3.0,
            norm2: 4.0,
            r1: 1.0,
            r2: 1.0,
            mode: Mode::Join,
        }
    }

    /// φ = t + amp·sin(2t), endpoints pinned exactly.
    fn smooth_profile(grid: Grid, amp: f64) -> Profile {
        let mut values: Vec<f64> = grid.nodes().iter().map(|t| t + amp * (2.0 * t).sin()).collect();
        values[0] = 0.0;
        *values.last_mut().unwrap() = HALF_PI;
        let n = values.len();
        for v in &mut values[1..n - 1] {
            *v = v.clamp(0.0, HALF_PI);
        }
        Profile::new(grid, values).unwrap()
    }

    #[test]
    fn coefficients_by_mode() {
        let mut cfg = asym_cfg();
        let cj = CoefficientSet::for_config(&cfg).unwrap();
        assert_relative_eq!(cj.a1, 3.0, max_relative = 1e-15);
        assert_relative_eq!(cj.a2, 0.8f64.powi(4) / 1.2f64.powi(4) * 4.0, max_relative = 1e-15);
        cfg.mode = Mode::Hopf;
        let ch = CoefficientSet::for_config(&cfg).unwrap();
        assert_relative_eq!(ch.a2, 1.0 / 1.2f64.powi(4) * 4.0, max_relative = 1e-15);
    }

    #[test]
    fn potential_examples() {
        let cfg = sphere_cfg(1, 1.0);
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let t = std::f64::consts::FRAC_PI_4;
        assert_relative_eq!(potential(t, t, &coeffs).unwrap(), 2.0, max_relative = 1e-14);
        // φ = 0 kills the sin⁴φ term near t = 0
        let small = potential(1e-6, 0.0, &coeffs).unwrap();
        assert_relative_eq!(small, 1.0, max_relative = 1e-9);
        assert!(potential(0.0, 0.3, &coeffs).is_err());

        let mut hopf = sphere_cfg(1, 1.0);
        hopf.mode = Mode::Hopf;
        let hc = CoefficientSet::for_config(&hopf).unwrap();
        // cos(π/2) rounds to ~6e-17, so the Hopf cos⁴φ factor leaves dust
        assert!(potential(0.7, HALF_PI, &hc).unwrap().abs() < 1e-60);
    }

    #[test]
    fn j_sphere_identity_m1() {
        // (1+m1+m2)·∫ cos t sin t dt = 3/2 for the identity join on S³
        let cfg = sphere_cfg(1, 1.0);
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let grid = make_grid(2000, Grading::Uniform).unwrap();
        let j = evaluate_j(&Profile::linear(grid), &coeffs);
        assert!((j - 1.5).abs() < 1e-4, "J = {j}");
    }

    #[test]
    fn j_sphere_identity_m3() {
        // 7·∫ cos³t sin³t dt = 7/12
        let cfg = sphere_cfg(3, 3.0);
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let grid = make_grid(2000, Grading::Uniform).unwrap();
        let j = evaluate_j(&Profile::linear(grid), &coeffs);
        assert!((j - 7.0 / 12.0).abs() < 1e-4, "J = {j}");
    }

    #[test]
    fn jump_profile_pays_quartic_penalty() {
        let mut cfg = sphere_cfg(3, 0.0);
        cfg.norm1 = 0.0;
        cfg.norm2 = 0.0;
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let grid = make_grid(200, Grading::Uniform).unwrap();
        let n = grid.n();
        // step at mid-domain, where the weight does not mask the slope
        let mut jump = vec![0.0; n + 1];
        for v in jump.iter_mut().skip(n / 2) {
            *v = HALF_PI;
        }
        let jump = Profile::new(grid.clone(), jump).unwrap();
        let linear = Profile::linear(grid);
        assert!(evaluate_j(&jump, &coeffs) > 10.0 * evaluate_j(&linear, &coeffs));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for (cfg, amp) in [(asym_cfg(), 0.15), (sphere_cfg(2, 2.0), -0.1)] {
            let coeffs = CoefficientSet::for_config(&cfg).unwrap();
            let grid = make_grid(64, Grading::Uniform).unwrap();
            let p = smooth_profile(grid, amp);
            let g = grad_j(&p, &coeffs);
            let eps = 1e-6;
            let mut sup = 0.0f64;
            let mut gmax = 0.0f64;
            for i in 1..p.grid().n() {
                let mut up = p.values().to_vec();
                let mut dn = up.clone();
                up[i] += eps;
                dn[i] -= eps;
                let jp = evaluate_j(&Profile::from_parts_unchecked(p.grid().clone(), up), &coeffs);
                let jm = evaluate_j(&Profile::from_parts_unchecked(p.grid().clone(), dn), &coeffs);
                let fd = (jp - jm) / (2.0 * eps);
                sup = sup.max((fd - g[i - 1]).abs());
                gmax = gmax.max(g[i - 1].abs());
            }
            assert!(sup <= 1e-6 * gmax.max(1.0), "sup = {sup}, gmax = {gmax}");
        }
    }

    #[test]
    fn gradient_antisymmetric_on_symmetric_config() {
        let cfg = sphere_cfg(3, 3.0);
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let grid = make_grid(64, Grading::Uniform).unwrap();
        let p = Profile::linear(grid);
        let g = grad_j(&p, &coeffs);
        let m = g.len();
        let scale = g.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for i in 0..m {
            assert!(
                (g[i] + g[m - 1 - i]).abs() <= 1e-10 * scale,
                "antisymmetry violated at {i}: {} vs {}",
                g[i],
                g[m - 1 - i]
            );
        }
    }

    #[test]
    fn reflection_invariance_of_j() {
        let cfg = asym_cfg();
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let rcfg = reflect_config(&cfg);
        let rcoeffs = CoefficientSet::for_config(&rcfg).unwrap();
        let grid = make_grid(150, Grading::Uniform).unwrap();
        let p = smooth_profile(grid, 0.12);
        let rp = reflect_profile(&p);
        let j = evaluate_j(&p, &coeffs);
        let rj = evaluate_j(&rp, &rcoeffs);
        assert!((j - rj).abs() <= 1e-10 * (1.0 + j.abs()), "{j} vs {rj}");
    }

    #[test]
    fn resample_round_trips_linear_data() {
        let coarse = make_grid(40, Grading::Uniform).unwrap();
        let p = smooth_profile(coarse, 0.1);
        let fine = resample(&p, make_grid(160, Grading::Uniform).unwrap());
        assert!(fine.is_feasible());
        // exact at shared nodes (every 4th fine node is a coarse node)
        for (i, &v) in p.values().iter().enumerate() {
            assert!((fine.values()[4 * i] - v).abs() < 1e-15);
        }
        // and back: P1 interpolation is idempotent on its own breakpoints
        let back = resample(&fine, p.grid().clone());
        for (x, y) in back.values().iter().zip(p.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn x_norm_examples() {
        let grid = make_grid(2000, Grading::Uniform).unwrap();
        let zero = Profile::unpinned(grid.clone(), vec![0.0; grid.nodes().len()]).unwrap();
        assert_eq!(x_norm(&zero, |_| 1.0), 0.0);

        let cfg = sphere_cfg(1, 1.0);
        let linear = Profile::linear(grid.clone());
        let v = x_norm(&linear, |t| weight_raw(t, &cfg));
        // ∫ (1 + t⁴) cos t sin t dt, 20-digit reference 0.92146622220203334079
        assert!((v - 0.92146622220203334079).abs() < 1e-4, "x_norm = {v}");

        // quartic homogeneity: doubling the profile scales the norm by 16
        let doubled =
            Profile::unpinned(grid.clone(), linear.values().iter().map(|x| 2.0 * x).collect()).unwrap();
        let v2 = x_norm(&doubled, |t| weight_raw(t, &cfg));
        assert_relative_eq!(v2, 16.0 * v, max_relative = 1e-14);
    }

    #[test]
    fn hardy_ratio_examples() {
        let grid = make_grid(2000, Grading::Uniform).unwrap();
        let zero = Profile::unpinned(grid.clone(), vec![0.0; grid.nodes().len()]).unwrap();
        let cfg5 = {
            let mut c = sphere_cfg(5, 1.0);
            c.norm1 = 1.0;
            c
        };
        assert_eq!(hardy_ratio(&zero, &cfg5), 0.0);

        let sin_values: Vec<f64> = grid.nodes().iter().map(|t| t.sin()).collect();
        let p = Profile::unpinned(grid.clone(), sin_values).unwrap();
        let r1 = hardy_ratio(&p, &cfg5);
        let grid4 = make_grid(4000, Grading::Uniform).unwrap();
        let sin_values4: Vec<f64> = grid4.nodes().iter().map(|t| t.sin()).collect();
        let p4 = Profile::unpinned(grid4, sin_values4).unwrap();
        let r2 = hardy_ratio(&p4, &cfg5);
        assert!(r1.is_finite() && r1 > 0.0);
        assert!((r1 - r2).abs() <= 0.05 * r1, "ratio unstable: {r1} vs {r2}");

        let cfg4 = sphere_cfg(4, 1.0);
        let lin = Profile::linear(make_grid(2000, Grading::Uniform).unwrap());
        assert!(hardy_ratio(&lin, &cfg4).is_finite());
    }

    #[test]
    fn refinement_convergence() {
        let cfg = asym_cfg();
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let j_at = |n: usize| {
            let grid = make_grid(n, Grading::Uniform).unwrap();
            evaluate_j(&smooth_profile(grid, 0.1), &coeffs)
        };
        let mut gaps = Vec::new();
        for n in [100, 200, 400, 800] {
            gaps.push((j_at(n) - j_at(2 * n)).abs());
        }
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "gaps not decreasing: {gaps:?}");
        }
    }

    #[test]
    fn j_positive_for_feasible_profiles() {
        let cfg = asym_cfg();
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        let grid = make_grid(50, Grading::Uniform).unwrap();
        for amp in [-0.2, 0.0, 0.1, 0.3] {
            let p = smooth_profile(grid.clone(), amp);
            assert!(evaluate_j(&p, &coeffs) > 0.0);
        }
    }
}
