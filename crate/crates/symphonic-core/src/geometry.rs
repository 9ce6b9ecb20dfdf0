//! Ellipsoid geometry scalars: the axis profiles h(t), k(φ) and their
//! derivatives, the volume-density weight, eigenmap bookkeeping, and the
//! pointwise energy density of a join.
//!
//! Everything here is a pure function of its arguments; all other modules
//! build on these scalars.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles are accepted within this distance outside `[0, pi/2]` and clamped;
/// anything farther out is a domain error.
pub const ANGLE_TOL: f64 = 1e-12;

/// Which construction the profile equation describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Join,
    Hopf,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Join => write!(f, "join"),
            Mode::Hopf => write!(f, "hopf"),
        }
    }
}

/// Full parameter tuple of the reduction problem.
///
/// `m1`, `m2` are the sphere-factor dimensions; `a`, `b` the domain ellipsoid
/// axes; `c`, `d` the target axes; `norm1`, `norm2` the constant pointwise
/// pullback norms of the two input eigenmaps (the identity on `S^m`
/// contributes `m`). `r1`, `r2` are the domain sphere radii; they are carried
/// for provenance and enter no formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub m1: u32,
    pub m2: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub norm1: f64,
    pub norm2: f64,
    #[serde(default = "default_radius")]
    pub r1: f64,
    #[serde(default = "default_radius")]
    pub r2: f64,
    pub mode: Mode,
}

fn default_radius() -> f64 {
    1.0
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m1 < 1 || self.m2 < 1 {
            return Err(Error::InvalidConfig("m1 and m2 must be at least 1".into()));
        }
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("r1", self.r1),
            ("r2", self.r2),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be a positive finite real, got {v}")));
            }
        }
        for (name, v) in [("norm1", self.norm1), ("norm2", self.norm2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be a nonnegative finite real, got {v}")));
            }
        }
        Ok(())
    }
}

/// An eigenmap is a sphere-to-sphere map with harmonic homogeneous polynomial
/// components of degree `k` on `S^p`; its Laplace eigenvalue is `k(k+p-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenmapSpec {
    /// Polynomial homogeneity degree.
    pub k: u32,
    /// Domain sphere dimension.
    pub p: u32,
}

/// λ = k(k + p − 1).
pub fn eigenvalue(spec: EigenmapSpec) -> f64 {
    debug_assert!(spec.k >= 1 && spec.p >= 1);
    let (k, p) = (spec.k as f64, spec.p as f64);
    k * (k + p - 1.0)
}

/// Clamp an angle into `[0, pi/2]`, failing when it is out of range by more
/// than [`ANGLE_TOL`].
pub fn clamp_angle(x: f64) -> Result<f64> {
    if !(x >= -ANGLE_TOL && x <= std::f64::consts::FRAC_PI_2 + ANGLE_TOL) {
        return Err(Error::Domain { value: x, tol: ANGLE_TOL });
    }
    Ok(x.clamp(0.0, std::f64::consts::FRAC_PI_2))
}

#[inline]
pub(crate) fn h_raw(t: f64, cfg: &ProblemConfig) -> f64 {
    if cfg.a == cfg.b {
        return cfg.a; // sphere degeneration is exact
    }
    let (s, c) = t.sin_cos();
    (cfg.b * cfg.b * s * s + cfg.a * cfg.a * c * c).sqrt()
}

#[inline]
pub(crate) fn h_prime_raw(t: f64, cfg: &ProblemConfig) -> f64 {
    let (s, c) = t.sin_cos();
    (cfg.b * cfg.b - cfg.a * cfg.a) * s * c / h_raw(t, cfg)
}

#[inline]
pub(crate) fn k_raw(phi: f64, cfg: &ProblemConfig) -> f64 {
    if cfg.c == cfg.d {
        return cfg.c;
    }
    let (s, c) = phi.sin_cos();
    (cfg.d * cfg.d * s * s + cfg.c * cfg.c * c * c).sqrt()
}

#[inline]
pub(crate) fn k_prime_raw(phi: f64, cfg: &ProblemConfig) -> f64 {
    let (s, c) = phi.sin_cos();
    (cfg.d * cfg.d - cfg.c * cfg.c) * s * c / k_raw(phi, cfg)
}

#[inline]
pub(crate) fn weight_raw(t: f64, cfg: &ProblemConfig) -> f64 {
    let (s, c) = t.sin_cos();
    c.powi(cfg.m1 as i32) * s.powi(cfg.m2 as i32)
}

/// Domain axis profile h(t) = √(b² sin²t + a² cos²t).
pub fn h_of_t(t: f64, cfg: &ProblemConfig) -> Result<f64> {
    Ok(h_raw(clamp_angle(t)?, cfg))
}

/// dh/dt = (b² − a²) sin t cos t / h(t).
pub fn h_prime(t: f64, cfg: &ProblemConfig) -> Result<f64> {
    Ok(h_prime_raw(clamp_angle(t)?, cfg))
}

/// Target axis profile k(φ) = √(d² sin²φ + c² cos²φ).
pub fn k_of_phi(phi: f64, cfg: &ProblemConfig) -> Result<f64> {
    Ok(k_raw(clamp_angle(phi)?, cfg))
}

/// dk/dφ = (d² − c²) sin φ cos φ / k(φ).
pub fn k_prime(phi: f64, cfg: &ProblemConfig) -> Result<f64> {
    Ok(k_prime_raw(clamp_angle(phi)?, cfg))
}

/// Volume-density weight w(t) = cos^{m₁}t · sin^{m₂}t.
pub fn weight(t: f64, cfg: &ProblemConfig) -> Result<f64> {
    Ok(weight_raw(clamp_angle(t)?, cfg))
}

/// Pointwise energy density ‖d(f₁*f₂)‖² of the join (or Hopf construction)
/// along the profile, given the constant Dirichlet densities `e1 = |df₁|²`,
/// `e2 = |df₂|²` of the input maps.
///
/// Join: (c²cos²φ)/(a²cos²t)·e1 + (d²sin²φ)/(b²sin²t)·e2 + k²(φ)φ′²/h²(t).
/// Hopf: the second coefficient becomes (c²cos²φ)/(b²sin²t).
pub fn join_energy_density(
    t: f64,
    phi: f64,
    phi_prime: f64,
    cfg: &ProblemConfig,
    e1: f64,
    e2: f64,
) -> Result<f64> {
    let t = clamp_angle(t)?;
    let phi = clamp_angle(phi)?;
    let (st, ct) = t.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let num1 = cfg.c * cfg.c * cp * cp * e1;
    let num2 = match cfg.mode {
        Mode::Join => cfg.d * cfg.d * sp * sp * e2,
        Mode::Hopf => cfg.c * cfg.c * cp * cp * e2,
    };
    // The mathematical endpoints are singular unless the matching numerator
    // vanishes; detect them by the clamped t value.
    if t == 0.0 && num2 != 0.0 {
        return Err(Error::Singular { t, what: "second term has sin^2 t in the denominator" });
    }
    if t == std::f64::consts::FRAC_PI_2 && num1 != 0.0 {
        return Err(Error::Singular { t, what: "first term has cos^2 t in the denominator" });
    }
    let term1 = if num1 == 0.0 { 0.0 } else { num1 / (cfg.a * cfg.a * ct * ct) };
    let term2 = if num2 == 0.0 { 0.0 } else { num2 / (cfg.b * cfg.b * st * st) };
    let kv = k_raw(phi, cfg);
    let hv = h_raw(t, cfg);
    Ok(term1 + term2 + kv * kv * phi_prime * phi_prime / (hv * hv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(a: f64, b: f64, c: f64, d: f64) -> ProblemConfig {
        ProblemConfig {
            m1: 3,
            m2: 3,
            a,
            b,
            c,
            d,
            norm1: 3.0,
            norm2: 3.0,
            r1: 1.0,
            r2: 1.0,
            mode: Mode::Join,
        }
    }

    #[test]
    fn h_endpoints() {
        let g = cfg(2.0, 3.0, 1.0, 1.0);
        assert_eq!(h_of_t(0.0, &g).unwrap(), 2.0);
        assert_eq!(h_of_t(std::f64::consts::FRAC_PI_2, &g).unwrap(), 3.0);
        let sphere = cfg(1.0, 1.0, 1.0, 1.0);
        assert_eq!(h_of_t(std::f64::consts::FRAC_PI_4, &sphere).unwrap(), 1.0);
    }

    #[test]
    fn h_bounded_between_axes() {
        let g = cfg(2.0, 3.0, 1.0, 1.0);
        for i in 0..=100 {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / 100.0;
            let v = h_of_t(t, &g).unwrap();
            assert!((2.0..=3.0).contains(&v));
        }
    }

    #[test]
    fn h_prime_values() {
        let g = cfg(1.0, 1.0, 1.0, 1.0);
        assert_eq!(h_prime(0.7, &g).unwrap(), 0.0); // sphere: h constant
        let g = cfg(1.0, 2.0, 1.0, 1.0);
        assert_eq!(h_prime(0.0, &g).unwrap(), 0.0);
        // (b^2 - a^2) * (1/2) / sqrt(5/2) at t = pi/4, frozen reference
        assert_relative_eq!(
            h_prime(std::f64::consts::FRAC_PI_4, &g).unwrap(),
            0.9486832980505137996,
            max_relative = 1e-15
        );
        // second frozen point, t = pi/3
        assert_relative_eq!(
            h_of_t(std::f64::consts::FRAC_PI_3, &g).unwrap(),
            1.8027756377319946466,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            h_prime(std::f64::consts::FRAC_PI_3, &g).unwrap(),
            0.72057669212289210067,
            max_relative = 1e-15
        );
    }

    #[test]
    fn k_values() {
        let g = cfg(1.0, 1.0, 5.0, 7.0);
        assert_eq!(k_of_phi(0.0, &g).unwrap(), 5.0);
        let sphere = cfg(1.0, 1.0, 1.0, 1.0);
        assert_eq!(k_of_phi(0.3, &sphere).unwrap(), 1.0);
        assert_eq!(k_prime(0.3, &sphere).unwrap(), 0.0);
        let g = cfg(1.0, 1.0, 1.0, 2.0);
        assert_relative_eq!(
            k_of_phi(std::f64::consts::FRAC_PI_4, &g).unwrap(),
            (2.5f64).sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            k_of_phi(std::f64::consts::FRAC_PI_4, &g).unwrap(),
            1.581138830084189666,
            max_relative = 1e-15
        );
    }

    #[test]
    fn weight_endpoints_and_values() {
        let g = cfg(1.0, 1.0, 1.0, 1.0);
        assert_eq!(weight(0.0, &g).unwrap(), 0.0);
        let mut g1 = cfg(1.0, 1.0, 1.0, 1.0);
        g1.m1 = 1;
        g1.m2 = 1;
        assert_relative_eq!(weight(std::f64::consts::FRAC_PI_4, &g1).unwrap(), 0.5, max_relative = 1e-15);
        let mut g23 = cfg(1.0, 1.0, 1.0, 1.0);
        g23.m1 = 2;
        g23.m2 = 3;
        assert_relative_eq!(
            weight(std::f64::consts::FRAC_PI_3, &g23).unwrap(),
            0.16237976320958224627, // cos^2(pi/3) sin^3(pi/3), 20-digit reference
            max_relative = 1e-14
        );
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(EigenmapSpec { k: 1, p: 3 }), 3.0);
        assert_eq!(eigenvalue(EigenmapSpec { k: 2, p: 2 }), 6.0);
        assert_eq!(eigenvalue(EigenmapSpec { k: 1, p: 1 }), 1.0);
        for p in 1..=20 {
            assert_eq!(eigenvalue(EigenmapSpec { k: 1, p }), p as f64);
        }
    }

    #[test]
    fn clamp_behavior() {
        assert_eq!(clamp_angle(-0.5e-12).unwrap(), 0.0);
        assert!(clamp_angle(-1e-9).is_err());
        assert!(clamp_angle(f64::NAN).is_err());
        assert!(h_of_t(2.0, &cfg(1.0, 2.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn energy_density_values() {
        // identity join on spheres along phi = t: density is m1 + m2 + 1
        let g = cfg(1.0, 1.0, 1.0, 1.0);
        let t = std::f64::consts::FRAC_PI_4;
        let v = join_energy_density(t, t, 1.0, &g, 3.0, 3.0).unwrap();
        assert_relative_eq!(v, 7.0, max_relative = 1e-14);

        let v0 = join_energy_density(t, t, 0.0, &g, 0.0, 0.0).unwrap();
        assert_eq!(v0, 0.0);

        let v2 = join_energy_density(t, t, 0.0, &g, 1.0, 1.0).unwrap();
        assert_relative_eq!(v2, 2.0, max_relative = 1e-14);

        // singular endpoint with nonzero numerator errors out
        assert!(join_energy_density(0.0, 0.5, 1.0, &g, 1.0, 1.0).is_err());
        // compatible boundary data passes (phi(0) = 0 kills sin^2 phi)
        assert!(join_energy_density(0.0, 0.0, 1.0, &g, 1.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn h_prime_matches_finite_differences(
            t in 0.01..(std::f64::consts::FRAC_PI_2 - 0.01),
            a in 0.3f64..3.0,
            db in 0.2f64..2.0,
        ) {
            let g = cfg(a, a + db, 1.0, 1.0);
            let d = 1e-5;
            let fd = (h_raw(t + d, &g) - h_raw(t - d, &g)) / (2.0 * d);
            let hp = h_prime(t, &g).unwrap();
            prop_assert!((fd - hp).abs() <= 1e-8 * hp.abs().max(1.0));
        }

        #[test]
        fn k_prime_matches_finite_differences(
            phi in 0.01..(std::f64::consts::FRAC_PI_2 - 0.01),
            c in 0.3f64..3.0,
            dd in 0.2f64..2.0,
        ) {
            let g = cfg(1.0, 1.0, c, c + dd);
            let d = 1e-5;
            let fd = (k_raw(phi + d, &g) - k_raw(phi - d, &g)) / (2.0 * d);
            let kp = k_prime(phi, &g).unwrap();
            prop_assert!((fd - kp).abs() <= 1e-8 * kp.abs().max(1.0));
        }

        #[test]
        fn weight_reflection_symmetry(
            t in 0.0..std::f64::consts::FRAC_PI_2,
            m1 in 1u32..6,
            m2 in 1u32..6,
        ) {
            let mut g = cfg(1.0, 1.0, 1.0, 1.0);
            g.m1 = m1;
            g.m2 = m2;
            let mut gr = g.clone();
            gr.m1 = m2;
            gr.m2 = m1;
            let w1 = weight(t, &g).unwrap();
            let w2 = weight(std::f64::consts::FRAC_PI_2 - t, &gr).unwrap();
            // relative agreement away from the ends, absolute at the ends
            // (pi/2 - t is itself rounded, so "exact" means ulp-level here)
            prop_assert!((w1 - w2).abs() <= 1e-15_f64.max(1e-14 * w1.abs()));
        }
    }
}
