//! Phase-space points of the n-particle system.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minimum admissible separation between two particles.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-10;

/// The off-diagonal coupling `c` of the Lax matrix.
///
/// Only the two values `c = 1` and `c = i` are admitted. The derived pair
/// coupling of the Hamiltonian is `g = -c^2`: `REAL` is attractive and
/// produces a non-Hermitian Lax matrix, `IMAGINARY` is repulsive and
/// produces a Hermitian one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    Real,
    #[default]
    Imaginary,
}

impl Coupling {
    pub fn c(self) -> Complex64 {
        match self {
            Coupling::Real => Complex64::new(1.0, 0.0),
            Coupling::Imaginary => Complex64::new(0.0, 1.0),
        }
    }

    /// Pair coupling `g = -c^2` of the potential `g / (x_i - x_j)^2`.
    pub fn g(self) -> f64 {
        match self {
            Coupling::Real => -1.0,
            Coupling::Imaginary => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Real => "real",
            Coupling::Imaginary => "imaginary",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Coupling::Real),
            "imaginary" | "imag" => Ok(Coupling::Imaginary),
            other => Err(Error::InvalidInput(format!(
                "unknown coupling `{other}` (expected real|imaginary)"
            ))),
        }
    }
}

/// Positions and momenta of `n` unit-mass particles on a line.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    x: Vec<f64>,
    p: Vec<f64>,
    coupling: Coupling,
}

impl PhaseState {
    /// Builds a state, rejecting pairs closer than [`DEFAULT_MIN_SEPARATION`].
    pub fn new(x: Vec<f64>, p: Vec<f64>, coupling: Coupling) -> Result<Self> {
        Self::with_min_separation(x, p, coupling, DEFAULT_MIN_SEPARATION)
    }

    pub fn with_min_separation(
        x: Vec<f64>,
        p: Vec<f64>,
        coupling: Coupling,
        min_separation: f64,
    ) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidInput(
                "particle count must be at least 1".into(),
            ));
        }
        if x.len() != p.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions but {} momenta",
                x.len(),
                p.len()
            )));
        }
        if x.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        if let Some((i, j, distance)) = closest_pair(&x) {
            if distance <= min_separation {
                return Err(Error::PositionCollision { i, j, distance });
            }
        }
        Ok(PhaseState { x, p, coupling })
    }

    /// Rebuilds a state from the stacked coordinate vector `(x_1..x_n, p_1..p_n)`.
    pub fn from_coords(u: &[f64], coupling: Coupling) -> Result<Self> {
        if u.len() % 2 != 0 {
            return Err(Error::InvalidInput("odd-length coordinate vector".into()));
        }
        let n = u.len() / 2;
        Self::new(u[..n].to_vec(), u[n..].to_vec(), coupling)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// Stacked coordinates `(x_1..x_n, p_1..p_n)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut u = self.x.clone();
        u.extend_from_slice(&self.p);
        u
    }

    /// Smallest pairwise distance, `+inf` for a single particle.
    pub fn min_separation(&self) -> f64 {
        closest_pair(&self.x).map_or(f64::INFINITY, |(_, _, d)| d)
    }
}

fn closest_pair(x: &[f64]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = (x[i] - x[j]).abs();
            if best.map_or(true, |(_, _, b)| d < b) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

#[derive(Serialize, Deserialize)]
struct PhaseStateRepr {
    n: usize,
    coupling: Coupling,
    x: Vec<f64>,
    p: Vec<f64>,
}

impl Serialize for PhaseState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseStateRepr {
            n: self.n(),
            coupling: self.coupling,
            x: self.x.clone(),
            p: self.p.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhaseState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PhaseStateRepr::deserialize(deserializer)?;
        if repr.n != repr.x.len() || repr.n != repr.p.len() {
            return Err(serde::de::Error::custom(format!(
                "n = {} but got {} positions and {} momenta",
                repr.n,
                repr.x.len(),
                repr.p.len()
            )));
        }
        PhaseState::new(repr.x, repr.p, repr.coupling).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_constants() {
        assert_eq!(Coupling::Real.g(), -1.0);
        assert_eq!(Coupling::Imaginary.g(), 1.0);
        for c in [Coupling::Real, Coupling::Imaginary] {
            assert_eq!(-(c.c() * c.c()).re, c.g());
            assert_eq!(c.as_str().parse::<Coupling>().unwrap(), c);
        }
        assert!("complex".parse::<Coupling>().is_err());
    }

    #[test]
    fn rejects_collisions_and_bad_shapes() {
        let err = PhaseState::new(vec![1.0, 1.0 - 1e-12], vec![0.0, 0.0], Coupling::Imaginary);
        assert!(matches!(
            err,
            Err(Error::PositionCollision { i: 0, j: 1, .. })
        ));
        assert!(PhaseState::new(vec![], vec![], Coupling::Real).is_err());
        assert!(PhaseState::new(vec![0.0], vec![0.0, 1.0], Coupling::Real).is_err());
        assert!(PhaseState::new(vec![f64::NAN], vec![0.0], Coupling::Real).is_err());
    }

    #[test]
    fn json_schema() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.5], Coupling::Imaginary).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"n": 2, "coupling": "imaginary", "x": [1.0, -1.0], "p": [0.0, 0.5]})
        );
        let back: PhaseState = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);

        let bad = serde_json::json!({"n": 3, "coupling": "real", "x": [1.0], "p": [0.0]});
        assert!(serde_json::from_value::<PhaseState>(bad).is_err());
        let collide =
            serde_json::json!({"n": 2, "coupling": "real", "x": [1.0, 1.0], "p": [0.0, 0.0]});
        assert!(serde_json::from_value::<PhaseState>(collide).is_err());
    }
}
