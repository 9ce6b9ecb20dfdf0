//! Shooting oracle: the second, independent path to the profile. Integrates
//! the first-order (φ, ψ) system forward with classical RK4 from t = ε and
//! bisects the initial slope until the far boundary value matches, then the
//! result is compared against the variational minimizer.
//!
//! Near t = 0 the transport coefficient behaves like +m₂/t, so slope errors
//! in the initial data are damped going forward; near π/2 it behaves like
//! −m₁/(π/2−t), so the hit value is extremely sensitive to s — which is
//! exactly what makes bisection converge sharply.

use crate::error::{Error, Result};
use crate::euler_lagrange::{
    coefficient_a, coefficient_b_with, signed_cuberoot, FirstOrderState, ODECoefficients,
};
use crate::functional::CoefficientSet;
use crate::geometry::k_raw;
use crate::grid::HALF_PI;
use crate::solver::SolveReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ShootingOptions {
    /// Integration runs on [ε, π/2−ε].
    pub eps: f64,
    pub rk_steps: usize,
    /// Initial bisection bracket for the slope s.
    pub slope_lo: f64,
    pub slope_hi: f64,
    /// Bracket-width stopping tolerance on s.
    pub bisect_tol: f64,
    /// |hit − (π/2−ε)| acceptance tolerance.
    pub target_tol: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            eps: 1e-3,
            rk_steps: 20_000,
            slope_lo: 1e-3,
            slope_hi: 1e3,
            bisect_tol: 1e-10,
            target_tol: 1e-6,
        }
    }
}

impl ShootingOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < std::f64::consts::FRAC_PI_4) {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, pi/4), got {}",
                self.eps
            )));
        }
        if self.rk_steps == 0 {
            return Err(Error::InvalidConfig("rk_steps must be positive".into()));
        }
        if !(self.slope_lo > 0.0 && self.slope_hi.is_finite() && self.slope_lo < self.slope_hi) {
            return Err(Error::InvalidConfig(format!(
                "slope bracket must satisfy 0 < lo < hi, got [{}, {}]",
                self.slope_lo, self.slope_hi
            )));
        }
        if !(self.bisect_tol > 0.0) || !(self.target_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "bisect_tol and target_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One forward integration: states on the uniform step grid, the boundary
/// value reached, and whether the run left the admissible strip.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Monotone in t; if the run blew up these end at the last finite state.
    pub states: Vec<FirstOrderState>,
    /// φ at π/2−ε, or the last finite value when blown up.
    pub hit: f64,
    pub blown_up: bool,
}

/// Result of the slope search.
#[derive(Debug, Clone)]
pub struct ShootOutcome {
    pub s_star: f64,
    pub trajectory: Trajectory,
    /// Set when the 16-point bracket scan sees hit(s) decrease — recorded,
    /// not fatal: bisection still returns the best slope found.
    pub non_monotone: bool,
}

const BLOWUP_LO: f64 = -0.1;
const BLOWUP_HI: f64 = HALF_PI + 0.1;

fn rhs(t: f64, phi: f64, psi: f64, coeffs: &CoefficientSet) -> (f64, f64) {
    let kv = k_raw(phi, &coeffs.cfg);
    let phi_prime = signed_cuberoot(psi / (kv * kv));
    let a = coefficient_a(t, phi, phi_prime, &coeffs.cfg).expect("interior t");
    let b = coefficient_b_with(t, phi, coeffs).expect("interior t");
    (phi_prime, -a * psi - b)
}

/// Integrate from φ(ε) = s·ε, ψ(ε) = k²(φ(ε))·s³ up to π/2−ε.
pub fn integrate(s: f64, cfg: &crate::geometry::ProblemConfig, opts: &ShootingOptions) -> Result<Trajectory> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidInit(format!(
            "initial slope must be a positive finite number, got {s}"
        )));
    }
    opts.validate()?;
    let coeffs = CoefficientSet::for_config(cfg)?;
    Ok(integrate_with(s, &coeffs, opts))
}

fn integrate_with(s: f64, coeffs: &CoefficientSet, opts: &ShootingOptions) -> Trajectory {
    let t0 = opts.eps;
    let t1 = HALF_PI - opts.eps;
    let n = opts.rk_steps;
    let h = (t1 - t0) / n as f64;

    let mut phi = s * t0;
    let kv = k_raw(phi, &coeffs.cfg);
    let mut psi = kv * kv * s * s * s;

    let mut states = Vec::with_capacity(n + 1);
    states.push(FirstOrderState { t: t0, phi, psi });
    let mut blown_up = false;

    // t accumulates exactly like φ does (one += per step) so that on cases
    // whose solution is the diagonal the two stay bitwise in lockstep;
    // recomputing t0 + k·h instead lets φ−t random-walk at rounding level,
    // and the anti-damped mode near π/2 amplifies that seed measurably.
    let mut t = t0;
    for _ in 0..n {
        let t_next = t + h;
        let tm = t + 0.5 * h;

        let (p1, q1) = rhs(t, phi, psi, coeffs);
        let (p2, q2) = rhs(tm, phi + 0.5 * h * p1, psi + 0.5 * h * q1, coeffs);
        let (p3, q3) = rhs(tm, phi + 0.5 * h * p2, psi + 0.5 * h * q2, coeffs);
        let (p4, q4) = rhs(t_next, phi + h * p3, psi + h * q3, coeffs);

        let phi_new = phi + h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        let psi_new = psi + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);

        if !phi_new.is_finite() || !psi_new.is_finite() {
            blown_up = true;
            break;
        }
        phi = phi_new;
        psi = psi_new;
        t = t_next;
        states.push(FirstOrderState { t, phi, psi });
        if !(BLOWUP_LO..=BLOWUP_HI).contains(&phi) {
            blown_up = true;
            break;
        }
    }

    let hit = states.last().map(|st| st.phi).unwrap_or(phi);
    Trajectory { states, hit, blown_up }
}

/// Bisect the initial slope until φ(π/2−ε) matches π/2−ε.
pub fn shoot(cfg: &crate::geometry::ProblemConfig, opts: &ShootingOptions) -> Result<ShootOutcome> {
    opts.validate()?;
    let coeffs = CoefficientSet::for_config(cfg)?;
    let target = HALF_PI - opts.eps;

    let mut lo = opts.slope_lo;
    let mut hi = opts.slope_hi;
    let mut traj_lo = integrate_with(lo, &coeffs, opts);
    let mut traj_hi = integrate_with(hi, &coeffs, opts);
    let mut widenings = 0u32;
    while !(traj_lo.hit <= target && traj_hi.hit >= target) {
        if widenings == 3 {
            return Err(Error::BracketFailure {
                lo,
                hi,
                hit_lo: traj_lo.hit,
                hit_hi: traj_hi.hit,
                target,
                widenings,
            });
        }
        widenings += 1;
        if traj_lo.hit > target {
            lo /= 10.0;
            traj_lo = integrate_with(lo, &coeffs, opts);
        }
        if traj_hi.hit < target {
            hi *= 10.0;
            traj_hi = integrate_with(hi, &coeffs, opts);
        }
    }

    // 16-point geometric scan for non-monotone hit(s) on the bracket.
    // Blown-up runs are saturated to the strip edges: past blow-up the last
    // in-range φ is noise, only its side carries information.
    let ratio = hi / lo;
    let mut prev = f64::NEG_INFINITY;
    let mut non_monotone = false;
    for i in 0..16 {
        let s = lo * ratio.powf(i as f64 / 15.0);
        let traj = integrate_with(s, &coeffs, opts);
        let hit = if traj.blown_up {
            if traj.hit > target {
                BLOWUP_HI
            } else {
                BLOWUP_LO
            }
        } else {
            traj.hit
        };
        if hit < prev - 1e-12 {
            non_monotone = true;
        }
        prev = hit;
    }

    let mut best_s = lo;
    let mut best_err = (traj_lo.hit - target).abs();
    let mut best = traj_lo;
    if (traj_hi.hit - target).abs() < best_err {
        best_s = hi;
        best_err = (traj_hi.hit - target).abs();
        best = traj_hi;
    }
    while hi - lo >= opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        let traj = integrate_with(mid, &coeffs, opts);
        let err = (traj.hit - target).abs();
        if err < best_err {
            best_s = mid;
            best_err = err;
            best = traj.clone();
        }
        if err < opts.target_tol {
            break;
        }
        if traj.hit > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(ShootOutcome { s_star: best_s, trajectory: best, non_monotone })
}

/// Sup of |φ_variational − φ_shooting| over the profile-grid nodes that lie
/// in the trajectory's t-range, with the trajectory linearly interpolated.
pub fn compare(report: &SolveReport, traj: &Trajectory) -> f64 {
    let states = &traj.states;
    if states.len() < 2 {
        return f64::NAN;
    }
    let t_first = states[0].t;
    let t_last = states[states.len() - 1].t;
    let mut sup = 0.0f64;
    for (i, &t) in report.profile.grid().nodes().iter().enumerate() {
        if t < t_first || t > t_last {
            continue;
        }
        let j = states.partition_point(|st| st.t <= t).min(states.len() - 1);
        let (s0, s1) = (&states[j - 1], &states[j]);
        let w = (t - s0.t) / (s1.t - s0.t);
        let phi_shot = s0.phi + w * (s1.phi - s0.phi);
        sup = sup.max((report.profile.values()[i] - phi_shot).abs());
    }
    sup
}

/// RK4 for the scalar linear problem ψ′ = −A(t)ψ − B(t, φ̃(t)) with frozen
/// coefficients; returns ψ(t1). Used to measure raw integrator order.
pub fn integrate_frozen(
    coeffs: &ODECoefficients,
    phi_of: impl Fn(f64) -> f64,
    psi0: f64,
    t0: f64,
    t1: f64,
    steps: usize,
) -> f64 {
    let h = (t1 - t0) / steps as f64;
    let f = |t: f64, psi: f64| -(coeffs.a)(t) * psi - (coeffs.b)(t, phi_of(t));
    let mut psi = psi0;
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let t_next = if step + 1 == steps { t1 } else { t0 + (step + 1) as f64 * h };
        let tm = t + 0.5 * h;
        let k1 = f(t, psi);
        let k2 = f(tm, psi + 0.5 * h * k1);
        let k3 = f(tm, psi + 0.5 * h * k2);
        let k4 = f(t_next, psi + h * k3);
        psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    psi
}
