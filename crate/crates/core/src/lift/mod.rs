//! The bi-Hamiltonian pencil on `gl(n) x gl(n)` that the reduced brackets
//! descend from.
//!
//! Covectors are represented by trace gradients: for an observable `f` the
//! pair `(Fa, Fb)` satisfies `df(dA, dB) = tr(Fa dA) + tr(Fb dB)`, so
//! `Fa[(j, i)] = df/dA_ij`. In that language
//!
//! ```text
//! {f, g}_1 = tr(A (Gb Fa - Fb Ga)) + tr(B (Gb Fb - Fb Gb))
//! {f, g}_0 = tr(Gb Fa - Fb Ga)
//! ```
//!
//! and `{.,.}_0` is `{.,.}_1` frozen at `(A, B) = (I, 0)`.

mod checks;
mod observable;
mod point;

pub use checks::{
    hierarchy_check, jacobi_check, jacobi_triples, nijenhuis_spectrum_check, EigenCluster,
    JacobiResult, NijenhuisReport, NIJENHUIS_CLUSTER_TOLERANCE,
};
pub use observable::{
    matrix_gradient, FnMatrixObservable, MatrixBuiltin, MatrixObservable, LIFT_FD_REL,
};
pub use point::{random_lifted_point, LiftedPoint};

use num_complex::Complex64;

use crate::error::Result;
use crate::CMatrix;

/// `{f, g}_1` from trace gradients.
pub fn bracket1_grads(
    pt: &LiftedPoint,
    f: &(CMatrix, CMatrix),
    g: &(CMatrix, CMatrix),
) -> Complex64 {
    let (fa, fb) = f;
    let (ga, gb) = g;
    (&pt.a * (gb * fa - fb * ga)).trace() + (&pt.b * (gb * fb - fb * gb)).trace()
}

/// `{f, g}_0` from trace gradients.
pub fn bracket0_grads(f: &(CMatrix, CMatrix), g: &(CMatrix, CMatrix)) -> Complex64 {
    let (fa, fb) = f;
    let (ga, gb) = g;
    (gb * fa - fb * ga).trace()
}

pub fn bracket1_lift(
    f: &dyn MatrixObservable,
    g: &dyn MatrixObservable,
    pt: &LiftedPoint,
) -> Result<Complex64> {
    Ok(bracket1_grads(pt, &f.gradient(pt)?, &g.gradient(pt)?))
}

pub fn bracket0_lift(
    f: &dyn MatrixObservable,
    g: &dyn MatrixObservable,
    pt: &LiftedPoint,
) -> Result<Complex64> {
    Ok(bracket0_grads(&f.gradient(pt)?, &g.gradient(pt)?))
}

/// `{f, g}_0 + lambda {f, g}_1`.
pub fn bracket_pencil(
    lambda: f64,
    f: &dyn MatrixObservable,
    g: &dyn MatrixObservable,
    pt: &LiftedPoint,
) -> Result<Complex64> {
    let (df, dg) = (f.gradient(pt)?, g.gradient(pt)?);
    Ok(bracket0_grads(&df, &dg) + bracket1_grads(pt, &df, &dg) * lambda)
}
