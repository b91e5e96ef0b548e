use num_complex::Complex64;

use super::invariants::{gamma, invariant_gradients, invariants_ij};
use crate::error::{Error, Result};
use crate::lax::{build_lax, hamiltonian};
use crate::spectral::{faddeev_leverrier, spectral_coords};
use crate::state::PhaseState;

/// A scalar function on phase space.
///
/// Built-in observables are smooth away from collisions and away from
/// degenerate spectra. Implementations must be deterministic and re-entrant.
pub trait Observable: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, s: &PhaseState) -> Result<Complex64>;

    /// Closed-form gradient in `(x, p)` layout, when one is known.
    /// [`gradient`](super::gradient) falls back to finite differences otherwise.
    fn exact_gradient(&self, _s: &PhaseState) -> Option<Result<Vec<Complex64>>> {
        None
    }
}

/// The observables the verification suites are built from.
///
/// Power indices (`I`, `J`, `Gamma`) are 1-based like the invariants they
/// name; particle and branch indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Position(usize),
    Momentum(usize),
    Hamiltonian,
    /// `I_k = tr(L^k) / k`.
    I(usize),
    /// `J_k = tr(X L^(k-1))`.
    J(usize),
    /// `Gamma_l = l J_2 I_l - 2 J_l I_2`.
    Gamma(usize),
    /// `i`-th eigenvalue of `L` in spectral order.
    Lambda(usize),
    /// DN momentum conjugate to `Lambda(i)`.
    Mu(usize),
    /// MDN momentum conjugate to `Lambda(i)`.
    MuTilde(usize),
    /// `det(lambda - L)` at a fixed `lambda`.
    CharPoly(Complex64),
}

impl Observable for Builtin {
    fn name(&self) -> String {
        match self {
            Builtin::Position(i) => format!("x_{}", i + 1),
            Builtin::Momentum(i) => format!("p_{}", i + 1),
            Builtin::Hamiltonian => "H".into(),
            Builtin::I(k) => format!("I_{k}"),
            Builtin::J(k) => format!("J_{k}"),
            Builtin::Gamma(l) => format!("Gamma_{l}"),
            Builtin::Lambda(i) => format!("lambda_{}", i + 1),
            Builtin::Mu(i) => format!("mu_{}", i + 1),
            Builtin::MuTilde(i) => format!("mu_tilde_{}", i + 1),
            Builtin::CharPoly(l) => format!("Delta({}{:+}i)", l.re, l.im),
        }
    }

    fn eval(&self, s: &PhaseState) -> Result<Complex64> {
        let n = s.n();
        let check = |i: usize| {
            if i < n {
                Ok(i)
            } else {
                Err(Error::IndexOutOfRange { index: i, n })
            }
        };
        let check_power = |k: usize| {
            if (1..=n).contains(&k) {
                Ok(k)
            } else {
                Err(Error::IndexOutOfRange { index: k, n })
            }
        };
        match *self {
            Builtin::Position(i) => Ok(Complex64::new(s.x()[check(i)?], 0.0)),
            Builtin::Momentum(i) => Ok(Complex64::new(s.p()[check(i)?], 0.0)),
            Builtin::Hamiltonian => hamiltonian(s).map(|h| Complex64::new(h, 0.0)),
            Builtin::I(k) => Ok(invariants_ij(s)?.i(check_power(k)?)),
            Builtin::J(k) => Ok(invariants_ij(s)?.j(check_power(k)?)),
            Builtin::Gamma(l) => gamma(s, l),
            Builtin::Lambda(i) => Ok(spectral_coords(&build_lax(s)?)?.lambdas[check(i)?]),
            Builtin::Mu(i) => Ok(spectral_coords(&build_lax(s)?)?.mu[check(i)?]),
            Builtin::MuTilde(i) => Ok(spectral_coords(&build_lax(s)?)?.mu_tilde[check(i)?]),
            Builtin::CharPoly(lambda) => Ok(faddeev_leverrier(&build_lax(s)?.l).det_at(lambda)),
        }
    }

    fn exact_gradient(&self, s: &PhaseState) -> Option<Result<Vec<Complex64>>> {
        let n = s.n();
        let unit = |k: usize| {
            let mut g = vec![Complex64::new(0.0, 0.0); 2 * n];
            g[k] = Complex64::new(1.0, 0.0);
            g
        };
        let power = |k: usize| {
            if (1..=n).contains(&k) {
                Ok(k)
            } else {
                Err(Error::IndexOutOfRange { index: k, n })
            }
        };
        let grads = |m: usize| invariant_gradients(s, m);
        let result = match *self {
            Builtin::Position(i) | Builtin::Momentum(i) if i >= n => {
                Err(Error::IndexOutOfRange { index: i, n })
            }
            Builtin::Position(i) => Ok(unit(i)),
            Builtin::Momentum(i) => Ok(unit(n + i)),
            // H = I_2 for either coupling.
            Builtin::Hamiltonian => {
                grads(2).map(|(di, _)| di[1].iter().map(|v| Complex64::new(v.re, 0.0)).collect())
            }
            Builtin::I(k) => power(k)
                .and_then(grads)
                .map(|(mut di, _)| di.swap_remove(k - 1)),
            Builtin::J(k) => power(k)
                .and_then(grads)
                .map(|(_, mut dj)| dj.swap_remove(k - 1)),
            Builtin::Gamma(l) => gamma(s, l).and_then(|_| {
                let inv = invariants_ij(s)?;
                let (di, dj) = grads(n)?;
                let (lf, i2, j2, il, jl) = (l as f64, inv.i(2), inv.j(2), inv.i(l), inv.j(l));
                Ok((0..2 * n)
                    .map(|a| {
                        (dj[1][a] * il + di[l - 1][a] * j2) * lf
                            - (dj[l - 1][a] * i2 + di[1][a] * jl) * 2.0
                    })
                    .collect())
            }),
            Builtin::Lambda(_) | Builtin::Mu(_) | Builtin::MuTilde(_) | Builtin::CharPoly(_) => {
                return None
            }
        };
        Some(result)
    }
}

/// An observable backed by a closure.
pub struct FnObservable<F> {
    name: String,
    f: F,
}

impl<F> FnObservable<F>
where
    F: Fn(&PhaseState) -> Result<Complex64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnObservable {
            name: name.into(),
            f,
        }
    }
}

impl<F> Observable for FnObservable<F>
where
    F: Fn(&PhaseState) -> Result<Complex64> + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, s: &PhaseState) -> Result<Complex64> {
        (self.f)(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Coupling;

    #[test]
    fn builtins_on_test_state() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        assert_eq!(
            Builtin::Hamiltonian.eval(&s).unwrap(),
            Complex64::new(0.25, 0.0)
        );
        assert_eq!(
            Builtin::Position(1).eval(&s).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        assert!((Builtin::Lambda(1).eval(&s).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let d = Builtin::CharPoly(Complex64::new(0.5, 0.0))
            .eval(&s)
            .unwrap();
        assert!(d.norm() < 1e-15);
        assert!(matches!(
            Builtin::I(3).eval(&s),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            Builtin::Momentum(2).eval(&s),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(Builtin::MuTilde(0).name(), "mu_tilde_1");
    }
}
