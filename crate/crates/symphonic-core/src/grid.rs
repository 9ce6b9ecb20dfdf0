//! Grids over `[0, pi/2]`: uniform, or graded toward both endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Node placement rule. `Graded(gamma)` clusters nodes near both endpoints
/// symmetrically via σ(u) = u^γ / (u^γ + (1−u)^γ); `gamma = 1` is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Grading {
    Uniform,
    Graded(f64),
}

/// A strictly increasing partition t₀ = 0 < t₁ < … < t_n = π/2.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    nodes: Vec<f64>,
    grading: Grading,
}

/// Build a grid with `n ≥ 4` cells.
pub fn make_grid(n: usize, grading: Grading) -> Result<Grid> {
    if n < 4 {
        return Err(Error::InvalidConfig(format!("grid needs n >= 4 cells, got {n}")));
    }
    if let Grading::Graded(g) = grading {
        if !(g >= 1.0) || !g.is_finite() {
            return Err(Error::InvalidConfig(format!("grading strength must be >= 1, got {g}")));
        }
    }
    let nodes: Vec<f64> = (0..=n)
        .map(|i| {
            let u = i as f64 / n as f64;
            match grading {
                Grading::Uniform => HALF_PI * u,
                Grading::Graded(g) if g == 1.0 => HALF_PI * u,
                Grading::Graded(g) => {
                    let up = u.powf(g);
                    let vp = (1.0 - u).powf(g);
                    HALF_PI * up / (up + vp)
                }
            }
        })
        .collect();
    debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    Ok(Grid { n, nodes, grading })
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Construct directly from externally supplied nodes (e.g. a profile CSV).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.len() < 5 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 5 nodes (n >= 4 cells), got {}",
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != HALF_PI {
            return Err(Error::InvalidConfig("grid nodes must start at 0 and end at pi/2".into()));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1] && w[1].is_finite()) {
            return Err(Error::InvalidConfig("grid nodes must be strictly increasing and finite".into()));
        }
        let n = nodes.len() - 1;
        Ok(Grid { n, nodes, grading: Grading::Uniform })
    }
}
