//! Central differences with one Richardson step.

use num_complex::Complex64;

use super::observable::Observable;
use crate::error::{Error, Result};
use crate::state::PhaseState;

/// Finite-difference step, relative to `max(1, |u_i|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdStep {
    pub rel: f64,
}

impl Default for FdStep {
    fn default() -> Self {
        FdStep { rel: 1e-5 }
    }
}

impl FdStep {
    pub fn new(rel: f64) -> Self {
        FdStep { rel }
    }

    pub fn at(&self, value: f64) -> f64 {
        self.rel * value.abs().max(1.0)
    }
}

/// Gradients of a vector-valued phase-space function.
///
/// Row `m` of the result is the gradient of output `m` with respect to
/// `(x_1..x_n, p_1..p_n)`. Each partial is `(4 D(h/2) - D(h)) / 3` with
/// `D(h)` the central difference of step `h`.
pub fn jacobian<F>(f: F, s: &PhaseState, step: FdStep) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(&PhaseState) -> Result<Vec<Complex64>>,
{
    let u = s.coords();
    let dim = u.len();
    let coupling = s.coupling();
    let eval_at = |i: usize, delta: f64| -> Result<Vec<Complex64>> {
        let mut v = u.clone();
        v[i] += delta;
        let shifted = PhaseState::from_coords(&v, coupling).map_err(|e| {
            Error::eval(
                "stencil",
                format!("coordinate {i} shifted by {delta:e}: {e}"),
            )
        })?;
        f(&shifted)
    };
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let h = step.at(u[i]);
        let (fp, fm) = (eval_at(i, h)?, eval_at(i, -h)?);
        let (fp2, fm2) = (eval_at(i, 0.5 * h)?, eval_at(i, -0.5 * h)?);
        let col = (0..fp.len())
            .map(|m| {
                let coarse = (fp[m] - fm[m]) / (2.0 * h);
                let fine = (fp2[m] - fm2[m]) / h;
                (fine * 4.0 - coarse) / 3.0
            })
            .collect();
        columns.push(col);
    }
    let outputs = columns.first().map_or(0, Vec::len);
    Ok((0..outputs)
        .map(|m| columns.iter().map(|col| col[m]).collect())
        .collect())
}

/// Gradient of a scalar observable with respect to `(x, p)`.
///
/// Uses the observable's closed-form gradient when it has one, finite
/// differences with `step` otherwise.
pub fn gradient(f: &dyn Observable, s: &PhaseState, step: FdStep) -> Result<Vec<Complex64>> {
    if let Some(exact) = f.exact_gradient(s) {
        return exact;
    }
    let rows = jacobian(
        |st| {
            f.eval(st)
                .map(|v| vec![v])
                .map_err(|e| Error::eval(f.name(), e))
        },
        s,
        step,
    )?;
    Ok(rows.into_iter().next().unwrap_or_default())
}

/// Derivative of every output along a fixed direction in `(x, p)`.
pub fn directional_derivative<F>(
    f: F,
    s: &PhaseState,
    direction: &[f64],
    step: FdStep,
) -> Result<Vec<Complex64>>
where
    F: Fn(&PhaseState) -> Result<Vec<Complex64>>,
{
    let u = s.coords();
    if direction.len() != u.len() {
        return Err(Error::InvalidInput(
            "direction has the wrong dimension".into(),
        ));
    }
    let scale = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let h = step.at(scale);
    let eval_at = |t: f64| -> Result<Vec<Complex64>> {
        let v: Vec<f64> = u.iter().zip(direction).map(|(a, d)| a + t * d).collect();
        f(&PhaseState::from_coords(&v, s.coupling())?)
    };
    let (fp, fm) = (eval_at(h)?, eval_at(-h)?);
    let (fp2, fm2) = (eval_at(0.5 * h)?, eval_at(-0.5 * h)?);
    Ok((0..fp.len())
        .map(|m| {
            let coarse = (fp[m] - fm[m]) / (2.0 * h);
            let fine = (fp2[m] - fm2[m]) / h;
            (fine * 4.0 - coarse) / 3.0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::observable::{Builtin, FnObservable};
    use crate::state::Coupling;

    #[test]
    fn linear_observable() {
        let s = PhaseState::new(
            vec![0.3, -1.2, 2.0],
            vec![0.1, 0.5, -0.7],
            Coupling::Imaginary,
        )
        .unwrap();
        let g = gradient(&Builtin::I(1), &s, FdStep::default()).unwrap();
        for (k, v) in g.iter().enumerate() {
            let expected = if k < 3 { 0.0 } else { 1.0 };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn hamiltonian_force() {
        // dH/dx_1 = -2 g / (x_1 - x_2)^3 = -1/4 at the test state.
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let g = gradient(&Builtin::Hamiltonian, &s, FdStep::default()).unwrap();
        assert!((g[0] - Complex64::new(-0.25, 0.0)).norm() < 1e-9);
        assert!((g[1] - Complex64::new(0.25, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn single_eigenvalue() {
        let s = PhaseState::new(vec![4.0], vec![-0.5], Coupling::Real).unwrap();
        let g = gradient(&Builtin::Lambda(0), &s, FdStep::default()).unwrap();
        assert!(g[0].norm() < 1e-10);
        assert!((g[1] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn stencil_collision_is_eval_failure() {
        let s = PhaseState::new(vec![0.0, 0.5], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let h = FnObservable::new("H", |st: &PhaseState| Builtin::Hamiltonian.eval(st));
        assert!(matches!(
            gradient(&h, &s, FdStep::new(1.0)),
            Err(Error::EvalFailure { .. })
        ));
    }
}
