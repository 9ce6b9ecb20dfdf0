//! The profile ODE in strong form and in the first-order (φ, ψ) transport
//! form, plus the residual diagnostics that cross-check minimizers.
//!
//! The canonical strong form is the Euler–Lagrange equation of the
//! functional's integrand, derived once and pinned by tests:
//!
//!   F = k⁴/h⁴·(φ′³)′ + 3k³k′/h⁴·φ′⁴
//!       − k⁴/h⁴·(m₁ tan t − m₂ cot t + 4h′/h)·φ′³ + P(t, φ)
//!
//! with forcing P = a₁cos³φ sinφ/cos⁴t − a₂sin³φ cosφ/sin⁴t in join mode and
//! (a₁/cos⁴t + a₂/sin⁴t)·cos³φ sinφ in Hopf mode (P = −¼ ∂potential/∂φ, the
//! same kernel the discrete gradient uses).
//!
//! Substituting ψ = k²(φ)·φ′³ turns F = 0 into the linear transport equation
//! ψ′ + Aψ + B = 0 with the coefficients below; the algebraic identity
//! [ψ′ + Aψ + B]·k²/h⁴ = F fixes every sign and factor and is asserted over
//! analytic test profiles rather than trusted.

use crate::error::{Error, Result};
use crate::functional::{potential_dphi_kernel, CoefficientSet, Profile};
use crate::geometry::{clamp_angle, h_prime_raw, h_raw, k_prime_raw, k_raw, ProblemConfig};
use crate::grid::HALF_PI;

/// Interior margin for the reported residual sup: tan/cot make endpoint
/// residuals meaningless at finite resolution.
pub const RESIDUAL_DELTA: f64 = 0.05;

/// Shooting state at one t: the profile value and the transported
/// ψ = k²(φ)·(φ′)³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderState {
    pub t: f64,
    pub phi: f64,
    pub psi: f64,
}

impl FirstOrderState {
    /// Recover φ′ = cbrt(ψ / k²(φ)).
    pub fn phi_prime(&self, cfg: &ProblemConfig) -> f64 {
        let k = k_raw(self.phi, cfg);
        signed_cuberoot(self.psi / (k * k))
    }
}

/// sign(x)·|x|^{1/3}: odd, monotone inverse of the cube.
pub fn signed_cuberoot(x: f64) -> f64 {
    x.cbrt()
}

fn require_interior(t: f64) -> Result<f64> {
    let t = clamp_angle(t)?;
    if t == 0.0 || t == HALF_PI {
        return Err(Error::Singular { t, what: "ODE coefficients have tan/cot factors" });
    }
    Ok(t)
}

/// Transport coefficient of ψ′ + Aψ + B = 0:
///
///   A(t, φ, φ′) = (k′/k)·φ′ − (m₁ tan t − m₂ cot t + 4h′/h).
///
/// The (k′/k)φ′ part is what remains of the strong form's 3k³k′φ′⁴ term
/// after ψ′ = k²(φ′³)′ + 2kk′φ′⁴ absorbs two thirds of it; it vanishes on
/// sphere targets. A → +m₂/t as t → 0⁺ (damping for forward integration)
/// and −m₁/(π/2−t) near the right end.
pub fn coefficient_a(t: f64, phi: f64, phi_prime: f64, cfg: &ProblemConfig) -> Result<f64> {
    let t = require_interior(t)?;
    let (st, ct) = t.sin_cos();
    let bracket = cfg.m1 as f64 * st / ct - cfg.m2 as f64 * ct / st
        + 4.0 * h_prime_raw(t, cfg) / h_raw(t, cfg);
    let kv = k_raw(phi, cfg);
    Ok(k_prime_raw(phi, cfg) / kv * phi_prime - bracket)
}

/// Forcing coefficient of ψ′ + Aψ + B = 0: B(t, φ) = (h⁴/k²)·P(t, φ).
pub fn coefficient_b(t: f64, phi: f64, cfg: &ProblemConfig) -> Result<f64> {
    let coeffs = CoefficientSet::for_config(cfg)?;
    coefficient_b_with(t, phi, &coeffs)
}

pub(crate) fn coefficient_b_with(t: f64, phi: f64, coeffs: &CoefficientSet) -> Result<f64> {
    let t = require_interior(t)?;
    let cfg = &coeffs.cfg;
    let hv = h_raw(t, cfg);
    let kv = k_raw(phi, cfg);
    let h4 = hv * hv * hv * hv;
    Ok(h4 / (kv * kv) * forcing(t, phi, coeffs))
}

/// P(t, φ) = −¼ ∂potential/∂φ, evaluated through the same kernel as the
/// discrete gradient.
fn forcing(t: f64, phi: f64, coeffs: &CoefficientSet) -> f64 {
    let (st, ct) = t.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let inv_cos4 = 1.0 / (ct * ct * ct * ct);
    let inv_sin4 = 1.0 / (st * st * st * st);
    -0.25 * potential_dphi_kernel(inv_cos4, inv_sin4, sp, cp, coeffs)
}

/// Transport coefficients packaged as callables, e.g. frozen along a fixed
/// profile for manufactured-problem integrator tests.
pub struct ODECoefficients {
    /// t ↦ A(t)
    pub a: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// (t, φ) ↦ B(t, φ)
    pub b: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl ODECoefficients {
    /// Freeze A along a given smooth profile (B stays a function of (t, φ)).
    pub fn frozen<F, G>(cfg: &ProblemConfig, phi: F, phi_prime: G) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let coeffs = CoefficientSet::for_config(cfg)?;
        let cfg_a = cfg.clone();
        Ok(ODECoefficients {
            a: Box::new(move |t| {
                coefficient_a(t, phi(t), phi_prime(t), &cfg_a).expect("interior t")
            }),
            b: Box::new(move |t, phi| coefficient_b_with(t, phi, &coeffs).expect("interior t")),
        })
    }
}

/// The strong form split into its five terms, for term-level diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongFormTerms {
    /// k⁴/h⁴·(φ′³)′
    pub derivative: f64,
    /// 3k³k′/h⁴·φ′⁴ — vanishes on sphere targets (c = d)
    pub kprime: f64,
    /// −k⁴/h⁴·(m₁ tan t − m₂ cot t)·φ′³
    pub angular: f64,
    /// −k⁴/h⁴·(4h′/h)·φ′³ — vanishes on sphere domains (a = b)
    pub hprime: f64,
    /// P(t, φ)
    pub forcing: f64,
}

impl StrongFormTerms {
    pub fn total(&self) -> f64 {
        self.derivative + self.kprime + self.angular + self.hprime + self.forcing
    }
}

/// Assemble the strong form from caller-supplied derivatives; `dphi3` is the
/// value of (φ′³)′ at t.
pub fn strong_form(
    t: f64,
    phi: f64,
    phi_prime: f64,
    dphi3: f64,
    coeffs: &CoefficientSet,
) -> Result<StrongFormTerms> {
    let t = require_interior(t)?;
    let cfg = &coeffs.cfg;
    let (st, ct) = t.sin_cos();
    let kv = k_raw(phi, cfg);
    let kp = k_prime_raw(phi, cfg);
    let hv = h_raw(t, cfg);
    let hp = h_prime_raw(t, cfg);
    let inv_h4 = 1.0 / (hv * hv * hv * hv);
    let k3 = kv * kv * kv;
    let k4 = k3 * kv;
    let p2 = phi_prime * phi_prime;
    let p3 = p2 * phi_prime;
    Ok(StrongFormTerms {
        derivative: k4 * inv_h4 * dphi3,
        kprime: 3.0 * k3 * kp * inv_h4 * p2 * p2,
        angular: -k4 * inv_h4 * (cfg.m1 as f64 * st / ct - cfg.m2 as f64 * ct / st) * p3,
        hprime: -k4 * inv_h4 * 4.0 * hp / hv * p3,
        forcing: forcing(t, phi, coeffs),
    })
}

/// Strong-form residual at each interior node of a profile, using centered
/// finite differences: cell slopes give (φ′³)′ through midpoint differences,
/// and φ′ is the centered node estimate.
pub fn residual(p: &Profile, cfg: &ProblemConfig) -> Result<Vec<f64>> {
    let n = p.grid().n();
    if n < 8 {
        return Err(Error::InvalidConfig(format!("residual needs n >= 8 cells, got {n}")));
    }
    let coeffs = CoefficientSet::for_config(cfg)?;
    let nodes = p.grid().nodes();
    let values = p.values();
    let mut out = Vec::with_capacity(n - 1);
    for i in 1..n {
        let dt_l = nodes[i] - nodes[i - 1];
        let dt_r = nodes[i + 1] - nodes[i];
        let s_l = (values[i] - values[i - 1]) / dt_l;
        let s_r = (values[i + 1] - values[i]) / dt_r;
        // midpoints of the two adjacent cells
        let tm_l = 0.5 * (nodes[i - 1] + nodes[i]);
        let tm_r = 0.5 * (nodes[i] + nodes[i + 1]);
        let dphi3 = (s_r * s_r * s_r - s_l * s_l * s_l) / (tm_r - tm_l);
        let phi_prime = (values[i + 1] - values[i - 1]) / (nodes[i + 1] - nodes[i - 1]);
        let terms = strong_form(nodes[i], values[i], phi_prime, dphi3, &coeffs)?;
        out.push(terms.total());
    }
    Ok(out)
}

/// Sup of |residual| over interior nodes with t ∈ [δ, π/2 − δ].
pub fn residual_sup(p: &Profile, cfg: &ProblemConfig, delta: f64) -> Result<f64> {
    let res = residual(p, cfg)?;
    let nodes = p.grid().nodes();
    let mut sup = 0.0f64;
    for (i, r) in res.iter().enumerate() {
        let t = nodes[i + 1];
        if t >= delta && t <= HALF_PI - delta {
            sup = sup.max(r.abs());
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mode;
    use crate::grid::{make_grid, Grading};

    fn cfg_join(m1: u32, m2: u32, a: f64, b: f64, c: f64, d: f64, n1: f64, n2: f64) -> ProblemConfig {
        ProblemConfig { m1, m2, a, b, c, d, norm1: n1, norm2: n2, r1: 1.0, r2: 1.0, mode: Mode::Join }
    }

    fn sphere_identity() -> ProblemConfig {
        cfg_join(3, 3, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0)
    }

    fn asym() -> ProblemConfig {
        cfg_join(3, 4, 1.0, 1.2, 1.0, 0.8, 3.0, 4.0)
    }

    #[test]
    fn cuberoot_examples() {
        assert_eq!(signed_cuberoot(8.0), 2.0);
        assert_eq!(signed_cuberoot(-27.0), -3.0);
        assert_eq!(signed_cuberoot(0.0), 0.0);
    }

    #[test]
    fn state_round_trip() {
        let cfg = asym();
        for (phi, psi) in [(0.3, 2.0), (1.2, -0.7), (0.8, 1e-6)] {
            let st = FirstOrderState { t: 0.5, phi, psi };
            let pp = st.phi_prime(&cfg);
            let k = crate::geometry::k_of_phi(phi, &cfg).unwrap();
            let back = k * k * pp * pp * pp;
            assert!((back - psi).abs() <= 1e-12 * psi.abs().max(1e-300), "{back} vs {psi}");
        }
    }

    #[test]
    fn coefficient_a_structure() {
        // symmetric sphere problem: bracket cancels at pi/4 and k' = 0
        let cfg = sphere_identity();
        let a = coefficient_a(std::f64::consts::FRAC_PI_4, 0.3, 0.7, &cfg).unwrap();
        assert!(a.abs() < 1e-14, "A at pi/4 = {a}");
        // damping asymptotics: A ~ +m2/t near 0, ~ -m1/(pi/2 - t) near pi/2
        let near0 = coefficient_a(1e-4, 0.0, 1.0, &cfg).unwrap();
        assert!(near0 > 2.9e4, "A(1e-4) = {near0}");
        let near1 = coefficient_a(HALF_PI - 1e-4, HALF_PI, 1.0, &cfg).unwrap();
        assert!(near1 < -2.9e4, "A(pi/2 - 1e-4) = {near1}");
        assert!(coefficient_a(0.0, 0.0, 1.0, &cfg).is_err());
        assert!(coefficient_a(HALF_PI, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn coefficient_b_zeroes() {
        let cfg = asym();
        for t in [0.3, 0.9, 1.4] {
            assert_eq!(coefficient_b(t, 0.0, &cfg).unwrap(), 0.0);
            let b_top = coefficient_b(t, HALF_PI, &cfg).unwrap();
            assert!(b_top.abs() < 1e-12, "B at phi=pi/2: {b_top}");
        }
        // symmetric cancellation at the center
        let sym = cfg_join(3, 3, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0);
        let b = coefficient_b(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4, &sym).unwrap();
        assert!(b.abs() < 1e-15);
    }

    #[test]
    fn sphere_identity_first_order_balance() {
        // along phi = t: psi = 1, psi' = 0, and A·psi + B = 0 pointwise
        let cfg = sphere_identity();
        for i in 1..40 {
            let t = HALF_PI * i as f64 / 40.0 * 0.999;
            let a = coefficient_a(t, t, 1.0, &cfg).unwrap();
            let b = coefficient_b(t, t, &cfg).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            assert!((a + b).abs() <= 1e-13 * scale, "t={t}: A={a}, B={b}");
        }
    }

    /// The sign arbiter: [ψ′ + Aψ + B]·k²/h⁴ must equal the direct strong
    /// form, with ψ, ψ′ computed analytically from a smooth profile.
    #[test]
    fn first_order_equals_strong_form() {
        let configs = [asym(), {
            let mut c = asym();
            c.mode = Mode::Hopf;
            c
        }];
        for cfg in configs {
            let coeffs = CoefficientSet::for_config(&cfg).unwrap();
            // phi = t + 0.2 sin 2t: phi' = 1 + 0.4 cos 2t, phi'' = -0.8 sin 2t
            for i in 1..50 {
                let t = 0.03 + (HALF_PI - 0.06) * i as f64 / 50.0;
                let phi = t + 0.2 * (2.0 * t).sin();
                let pp = 1.0 + 0.4 * (2.0 * t).cos();
                let ppp = -0.8 * (2.0 * t).sin();
                let kv = k_raw(phi, &cfg);
                let kp = k_prime_raw(phi, &cfg);
                let psi = kv * kv * pp * pp * pp;
                let psi_prime = 2.0 * kv * kp * pp * pp * pp * pp + 3.0 * kv * kv * pp * pp * ppp;
                let a = coefficient_a(t, phi, pp, &cfg).unwrap();
                let b = coefficient_b(t, phi, &cfg).unwrap();
                let hv = h_raw(t, &cfg);
                let lhs = (psi_prime + a * psi + b) * kv * kv / (hv * hv * hv * hv);
                let terms = strong_form(t, phi, pp, 3.0 * pp * pp * ppp, &coeffs).unwrap();
                let rhs = terms.total();
                let scale = [terms.derivative, terms.kprime, terms.angular, terms.hprime, terms.forcing]
                    .iter()
                    .fold(0.0f64, |acc, x| acc + x.abs());
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1e-6 * scale),
                    "t={t}: lhs={lhs} rhs={rhs}"
                );
            }
        }
    }

    #[test]
    fn residual_of_exact_sphere_solution() {
        let cfg = sphere_identity();
        let grid = make_grid(1000, Grading::Uniform).unwrap();
        let p = Profile::linear(grid);
        let sup = residual_sup(&p, &cfg, RESIDUAL_DELTA).unwrap();
        assert!(sup < 1e-6, "residual sup = {sup}");
    }

    #[test]
    fn residual_rejects_non_solutions() {
        let cfg = sphere_identity();
        let grid = make_grid(200, Grading::Uniform).unwrap();
        let values: Vec<f64> = grid.nodes().iter().map(|t| (t / HALF_PI).powi(2) * HALF_PI).collect();
        let mut values = values;
        values[0] = 0.0;
        *values.last_mut().unwrap() = HALF_PI;
        let p = Profile::new(grid, values).unwrap();
        let sup = residual_sup(&p, &cfg, RESIDUAL_DELTA).unwrap();
        assert!(sup > 1e-1, "non-solution residual too small: {sup}");
    }

    #[test]
    fn residual_needs_enough_cells() {
        let cfg = sphere_identity();
        let grid = make_grid(6, Grading::Uniform).unwrap();
        assert!(residual(&Profile::linear(grid), &cfg).is_err());
    }

    #[test]
    fn sphere_degeneration_kills_ellipsoid_terms() {
        let cfg = sphere_identity();
        let coeffs = CoefficientSet::for_config(&cfg).unwrap();
        for i in 1..30 {
            let t = HALF_PI * i as f64 / 30.0 * 0.99;
            let terms = strong_form(t, 0.8 * t, 0.9, 0.3, &coeffs).unwrap();
            assert!(terms.kprime.abs() < 1e-15);
            assert!(terms.hprime.abs() < 1e-15);
        }
    }

    #[test]
    fn join_and_hopf_coincide_without_second_potential() {
        let mut join = asym();
        join.norm2 = 0.0;
        let mut hopf = join.clone();
        hopf.mode = Mode::Hopf;
        let cj = CoefficientSet::for_config(&join).unwrap();
        let ch = CoefficientSet::for_config(&hopf).unwrap();
        for i in 1..20 {
            let t = HALF_PI * i as f64 / 20.0 * 0.98;
            let phi = 0.7 * t;
            let tj = strong_form(t, phi, 0.8, 0.1, &cj).unwrap();
            let th = strong_form(t, phi, 0.8, 0.1, &ch).unwrap();
            for (a, b) in [
                (tj.derivative, th.derivative),
                (tj.kprime, th.kprime),
                (tj.angular, th.angular),
                (tj.hprime, th.hprime),
                (tj.forcing, th.forcing),
            ] {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
            }
        }
    }
}
