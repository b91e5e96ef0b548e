//! The two Poisson brackets on the reduced phase space.
//!
//! `{f, g}_0` is the canonical bracket
//! `sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i)`, which gives `{J_1, I_1}_0 = n`.
//! `{f, g}_1` is only known through its values on the chart functions
//! `Z = (I_1..I_n, J_1..J_n)`, so it is evaluated by expanding `df` and `dg`
//! in the basis `dZ` and contracting against that table.

use nalgebra::DVector;
use num_complex::Complex64;

use super::gradient::{gradient, FdStep};
use super::invariants::{invariant_gradients, invariants_ij_upto, InvariantBasis};
use super::observable::Observable;
use crate::error::{Error, Result};
use crate::state::PhaseState;
use crate::CMatrix;

/// Largest admissible condition number of the chart Jacobian.
pub const MAX_CHART_CONDITION: f64 = 1e10;

/// One of the chart functions, with its 1-based power index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    I(usize),
    J(usize),
}

/// `{f, g}_0` from two gradients in `(x, p)` layout.
pub fn bracket0_grads(df: &[Complex64], dg: &[Complex64]) -> Complex64 {
    let n = df.len() / 2;
    (0..n).map(|i| df[i] * dg[n + i] - df[n + i] * dg[i]).sum()
}

pub fn bracket0(
    f: &dyn Observable,
    g: &dyn Observable,
    s: &PhaseState,
    step: FdStep,
) -> Result<Complex64> {
    Ok(bracket0_grads(
        &gradient(f, s, step)?,
        &gradient(g, s, step)?,
    ))
}

/// Closed form of `{a, b}_0` on chart functions.
///
/// `{I_k, I_l} = 0`, `{J_l, I_k} = (k + l - 2) I_(k+l-2)` except
/// `{J_1, I_1} = n`, and `{J_k, J_l} = (l - k) J_(k+l-2)`.
/// `inv` must hold powers up to `2n - 2`.
pub fn closed_form0(a: Generator, b: Generator, inv: &InvariantBasis, n: usize) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    match (a, b) {
        (Generator::I(_), Generator::I(_)) => zero,
        (Generator::J(l), Generator::I(k)) => {
            if k == 1 && l == 1 {
                Complex64::new(n as f64, 0.0)
            } else {
                inv.i(k + l - 2) * (k + l - 2) as f64
            }
        }
        (Generator::I(_), Generator::J(_)) => -closed_form0(b, a, inv, n),
        (Generator::J(k), Generator::J(l)) => {
            if k == l {
                zero
            } else {
                inv.j(k + l - 2) * (l as f64 - k as f64)
            }
        }
    }
}

/// Closed form of `{a, b}_1` on chart functions.
///
/// `{I_k, I_l} = 0`, `{J_l, I_k} = (k + l - 1) I_(k+l-1)`,
/// `{J_k, J_l} = (l - k) J_(k+l-1)`. `inv` must hold powers up to `2n - 1`.
pub fn closed_form1(a: Generator, b: Generator, inv: &InvariantBasis) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    match (a, b) {
        (Generator::I(_), Generator::I(_)) => zero,
        (Generator::J(l), Generator::I(k)) => inv.i(k + l - 1) * (k + l - 1) as f64,
        (Generator::I(_), Generator::J(_)) => -closed_form1(b, a, inv),
        (Generator::J(k), Generator::J(l)) => {
            if k == l {
                zero
            } else {
                inv.j(k + l - 1) * (l as f64 - k as f64)
            }
        }
    }
}

/// The `(I, J)` chart at a state: its Jacobian, the factorised transpose,
/// and the `{.,.}_1` tensor on the chart differentials.
#[derive(Debug, Clone)]
pub struct IjChart {
    n: usize,
    /// Row `a` is `dZ_a` in `(x, p)` layout.
    jacobian: CMatrix,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    tensor: CMatrix,
    condition: f64,
    invariants: InvariantBasis,
}

impl IjChart {
    /// Builds the chart from the exact invariant gradients, rejecting
    /// ill-conditioned points.
    pub fn at(s: &PhaseState) -> Result<Self> {
        let n = s.n();
        let (di, dj) = invariant_gradients(s, n)?;
        let rows: Vec<Vec<Complex64>> = di.into_iter().chain(dj).collect();
        let jac = CMatrix::from_fn(2 * n, 2 * n, |a, b| rows[a][b]);
        let sv = jac.clone().singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| {
            (hi.max(v), lo.min(v))
        });
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(condition < MAX_CHART_CONDITION) {
            return Err(Error::SingularChart { condition });
        }
        let invariants = invariants_ij_upto(s, 2 * n)?;
        let tensor = CMatrix::from_fn(2 * n, 2 * n, |a, b| {
            closed_form1(generator(a, n), generator(b, n), &invariants)
        });
        Ok(IjChart {
            n,
            lu: jac.transpose().lu(),
            jacobian: jac,
            tensor,
            condition,
            invariants,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Invariants up to power `2n`.
    pub fn invariants(&self) -> &InvariantBasis {
        &self.invariants
    }

    /// `dZ_a` for a chart function.
    pub fn differential(&self, g: Generator) -> Vec<Complex64> {
        let a = index_of(g, self.n);
        self.jacobian.row(a).iter().copied().collect()
    }

    /// Coefficients `c` with `df = sum_a c_a dZ_a`.
    pub fn coefficients(&self, df: &[Complex64]) -> Result<DVector<Complex64>> {
        let rhs = DVector::from_column_slice(df);
        self.lu.solve(&rhs).ok_or(Error::SingularChart {
            condition: f64::INFINITY,
        })
    }

    pub fn bracket1_grads(&self, df: &[Complex64], dg: &[Complex64]) -> Result<Complex64> {
        let a = self.coefficients(df)?;
        let b = self.coefficients(dg)?;
        Ok((a.transpose() * &self.tensor * b)[(0, 0)])
    }
}

/// `{f, g}_1` at a state.
pub fn bracket1(
    f: &dyn Observable,
    g: &dyn Observable,
    s: &PhaseState,
    step: FdStep,
) -> Result<Complex64> {
    let chart = IjChart::at(s)?;
    chart.bracket1_grads(&gradient(f, s, step)?, &gradient(g, s, step)?)
}

fn generator(a: usize, n: usize) -> Generator {
    if a < n {
        Generator::I(a + 1)
    } else {
        Generator::J(a - n + 1)
    }
}

fn index_of(g: Generator, n: usize) -> usize {
    match g {
        Generator::I(k) => k - 1,
        Generator::J(k) => n + k - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::observable::Builtin;
    use crate::state::Coupling;

    fn test_state() -> PhaseState {
        PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap()
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn bracket0_table_examples() {
        let step = FdStep::default();
        let s = PhaseState::new(vec![0.7, -0.4], vec![0.2, 0.9], Coupling::Imaginary).unwrap();
        assert!(close(
            bracket0(&Builtin::J(1), &Builtin::I(1), &s, step).unwrap(),
            2.0,
            1e-9
        ));
        assert!(close(
            bracket0(&Builtin::I(1), &Builtin::I(2), &s, step).unwrap(),
            0.0,
            1e-9
        ));
        let s = test_state();
        assert!(close(
            bracket0(&Builtin::J(2), &Builtin::I(2), &s, step).unwrap(),
            0.5,
            1e-9
        ));
    }

    #[test]
    fn bracket1_table_examples() {
        // The test state has I_1 = 0 and a degenerate chart, so use nearby
        // regular points for the chart-based bracket.
        let step = FdStep::default();
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.3, -0.1], Coupling::Imaginary).unwrap();
        let i1 = Builtin::I(1).eval(&s).unwrap();
        let i2 = Builtin::I(2).eval(&s).unwrap();
        let v = bracket1(&Builtin::J(1), &Builtin::I(1), &s, step).unwrap();
        assert!((v - i1).norm() < 1e-8);
        let v = bracket1(&Builtin::J(2), &Builtin::I(1), &s, step).unwrap();
        assert!((v - i2 * 2.0).norm() < 1e-8);
        let s3 = PhaseState::new(
            vec![1.0, -0.5, 2.2],
            vec![0.3, -0.1, 0.6],
            Coupling::Imaginary,
        )
        .unwrap();
        let v = bracket1(&Builtin::I(2), &Builtin::I(3), &s3, step).unwrap();
        assert!(v.norm() < 1e-8);
    }

    #[test]
    fn bracket1_on_single_particle() {
        // I_1 = p, J_1 = x, {x, p}_1 = {J_1, I_1}_1 = I_1 = p.
        let s = PhaseState::new(vec![0.4], vec![1.7], Coupling::Imaginary).unwrap();
        let v = bracket1(
            &Builtin::Position(0),
            &Builtin::Momentum(0),
            &s,
            FdStep::default(),
        )
        .unwrap();
        assert!(close(v, 1.7, 1e-9));
    }

    #[test]
    fn singular_chart_detected() {
        // Two particles at rest: J_2 = tr(XL) and I_1 = tr L have
        // parallel differentials only in special configurations; a
        // coincident-eigenvalue point is the reliable failure.
        let s = PhaseState::new(
            vec![1.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0],
            Coupling::Imaginary,
        )
        .unwrap();
        let chart = IjChart::at(&s);
        if let Ok(c) = &chart {
            assert!(c.condition() < MAX_CHART_CONDITION);
        }
        let pathological =
            PhaseState::new(vec![1e3, -1e3], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        assert!(matches!(
            IjChart::at(&pathological),
            Err(Error::SingularChart { .. })
        ));
    }

    #[test]
    fn closed_forms_special_cases() {
        let inv = InvariantBasis {
            i: vec![Complex64::new(2.0, 0.0); 4],
            j: vec![Complex64::new(3.0, 0.0); 4],
        };
        assert_eq!(
            closed_form0(Generator::J(1), Generator::I(1), &inv, 5),
            Complex64::new(5.0, 0.0)
        );
        assert_eq!(
            closed_form0(Generator::I(1), Generator::J(1), &inv, 5),
            Complex64::new(-5.0, 0.0)
        );
        assert_eq!(
            closed_form0(Generator::J(1), Generator::J(1), &inv, 5),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            closed_form1(Generator::J(2), Generator::I(1), &inv),
            Complex64::new(4.0, 0.0)
        );
        assert_eq!(
            closed_form1(Generator::J(1), Generator::J(2), &inv),
            Complex64::new(3.0, 0.0)
        );
    }
}
