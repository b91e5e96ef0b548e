//! Spectral canonical coordinates for the rational Calogero-Moser system.
//!
//! The crate builds the Lax pair `(L, X)` of an n-particle state, computes the
//! eigenvalues of `L` together with two families of conjugate momenta, and
//! checks numerically the Poisson-geometric statements that make those
//! coordinates canonical. It also evolves states exactly (projection method)
//! and numerically (adaptive Runge-Kutta), and verifies the bi-Hamiltonian
//! pencil on `gl(n) x gl(n)` that the reduced structure descends from.
//!
//! See the guide under `book/` for a walk-through.

// Comparisons are negated on purpose so that NaN fails them; index loops
// mirror the matrix formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod lax;
pub mod lift;
pub mod poisson;
pub mod sample;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use lax::{build_lax, commutation_residual, hamiltonian, recover_state, LaxPair};
pub use spectral::{eigenvector_coords, spectral_coords, SpectralCoords};
pub use state::{Coupling, PhaseState};

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

pub use num_complex::Complex64;

/// The guide under `book/`, compiled so that its snippets run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lax-pair.md")]
    mod lax_pair {}
    #[doc = include_str!("../../../book/src/spectral-coordinates.md")]
    mod spectral_coordinates {}
    #[doc = include_str!("../../../book/src/brackets.md")]
    mod brackets {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/lifted-pencil.md")]
    mod lifted_pencil {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
