//! Lax pairs `(L, X)` and the identities they satisfy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Coupling, PhaseState};
use crate::CMatrix;

/// Default entrywise tolerance used by [`recover_state`].
pub const DEFAULT_LAX_TOLERANCE: f64 = 1e-8;

/// A Calogero-Moser pair: `L_ii = p_i`, `L_ij = c / (x_i - x_j)`, `X = diag(x)`.
///
/// `X` is stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxPair {
    pub l: CMatrix,
    pub x: DVector<f64>,
}

impl LaxPair {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `X` as a dense complex matrix.
    pub fn x_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.x.map(|v| Complex64::new(v, 0.0)))
    }

    /// Coupling read off the off-diagonal structure.
    ///
    /// `(L_12 (x_1 - x_2))^2 = c^2` is `+1` for `c = 1` and `-1` for `c = i`.
    /// A single particle carries no coupling information and defaults to
    /// [`Coupling::Imaginary`].
    pub fn coupling(&self) -> Coupling {
        if self.n() < 2 {
            return Coupling::default();
        }
        let c = self.l[(0, 1)] * (self.x[0] - self.x[1]);
        if (c * c).re > 0.0 {
            Coupling::Real
        } else {
            Coupling::Imaginary
        }
    }
}

/// Builds the Lax pair of a state.
pub fn build_lax(state: &PhaseState) -> Result<LaxPair> {
    let n = state.n();
    let (x, p) = (state.x(), state.p());
    let c = state.coupling().c();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = if i == j {
                Complex64::new(p[i], 0.0)
            } else {
                let d = x[i] - x[j];
                if d.abs() <= crate::state::DEFAULT_MIN_SEPARATION {
                    return Err(Error::PositionCollision {
                        i: i.min(j),
                        j: i.max(j),
                        distance: d.abs(),
                    });
                }
                c / d
            };
        }
    }
    Ok(LaxPair {
        l,
        x: DVector::from_column_slice(x),
    })
}

/// `H = 1/2 sum p^2 + g sum_{i<j} (x_i - x_j)^-2` with `g = -c^2`.
pub fn hamiltonian(state: &PhaseState) -> Result<f64> {
    let (x, p) = (state.x(), state.p());
    let g = state.coupling().g();
    let kinetic = 0.5 * p.iter().map(|v| v * v).sum::<f64>();
    let mut potential = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i] - x[j];
            if d.abs() <= crate::state::DEFAULT_MIN_SEPARATION {
                return Err(Error::PositionCollision {
                    i,
                    j,
                    distance: d.abs(),
                });
            }
            potential += 1.0 / (d * d);
        }
    }
    Ok(kinetic + g * potential)
}

/// `1/2 tr L^2`, which coincides with the Hamiltonian.
pub fn half_trace_l2(pair: &LaxPair) -> Complex64 {
    0.5 * (&pair.l * &pair.l).trace()
}

/// Max-entry norm of `[lambda I - L, X] - c (e e^T - I)`.
///
/// The commutator does not depend on `lambda`; it is evaluated at zero.
pub fn commutation_residual(pair: &LaxPair) -> f64 {
    let n = pair.n();
    let c = pair.coupling().c();
    let x = pair.x_matrix();
    let a = -&pair.l;
    let comm = &a * &x - &x * &a;
    let target = DMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { Complex64::new(0.0, 0.0) } else { c },
    );
    (comm - target).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Inverts [`build_lax`] with the default tolerance.
pub fn recover_state(pair: &LaxPair) -> Result<PhaseState> {
    recover_state_with(pair, DEFAULT_LAX_TOLERANCE)
}

/// Inverts [`build_lax`], checking every entry of `L` against the structure
/// implied by `X` and the inferred coupling.
pub fn recover_state_with(pair: &LaxPair, tolerance: f64) -> Result<PhaseState> {
    let n = pair.n();
    if pair.l.nrows() != n || pair.l.ncols() != n {
        return Err(Error::NotCmPair(format!(
            "L is {}x{} but X has {} entries",
            pair.l.nrows(),
            pair.l.ncols(),
            n
        )));
    }
    let coupling = pair.coupling();
    let c = coupling.c();
    let x: Vec<f64> = pair.x.iter().copied().collect();
    let mut p = Vec::with_capacity(n);
    for i in 0..n {
        let d = pair.l[(i, i)];
        if d.im.abs() > tolerance {
            return Err(Error::NotCmPair(format!(
                "L[{i}][{i}] has imaginary part {:e}",
                d.im
            )));
        }
        p.push(d.re);
        for j in 0..n {
            if i == j {
                continue;
            }
            let expected = c / (x[i] - x[j]);
            let dev = (pair.l[(i, j)] - expected).norm();
            if !(dev <= tolerance) {
                return Err(Error::NotCmPair(format!(
                    "L[{i}][{j}] deviates from c/(x_i - x_j) by {dev:e}"
                )));
            }
        }
    }
    PhaseState::new(x, p, coupling)
}
