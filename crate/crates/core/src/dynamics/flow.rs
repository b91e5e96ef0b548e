use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lax::build_lax;
use crate::spectral::eigen;
use crate::state::{Coupling, PhaseState};

/// The state at time `t` by the projection method.
///
/// Positions are the eigenvalues of `X + t L` and momenta the Rayleigh
/// quotients `psi* L psi / psi* psi` of the matching eigenvectors, both
/// taken at the initial state. Particles never pass each other, so the
/// `k`-th smallest eigenvalue belongs to the particle that started `k`-th
/// from the left; particle labels are kept.
pub fn exact_flow(s: &PhaseState, t: f64) -> Result<PhaseState> {
    if s.coupling() == Coupling::Real {
        return Err(Error::CouplingUnsupported(
            "the projection flow needs Hermitian L (imaginary coupling)".into(),
        ));
    }
    if t == 0.0 {
        return Ok(s.clone());
    }
    let pair = build_lax(s)?;
    let n = s.n();
    let m = pair.x_matrix() + &pair.l * Complex64::new(t, 0.0);
    let spec = eigen(&m, Coupling::Imaginary);
    if n > 1 && spec.degenerate {
        return Err(Error::DegenerateSpectrum {
            min_gap: spec.min_gap,
            threshold: spec.gap_threshold,
        });
    }
    let mut rank: Vec<usize> = (0..n).collect();
    rank.sort_by(|&a, &b| s.x()[a].total_cmp(&s.x()[b]));
    let mut x = vec![0.0; n];
    let mut p = vec![0.0; n];
    for (k, &particle) in rank.iter().enumerate() {
        let psi = &spec.right[k];
        let num = (psi.adjoint() * &pair.l * psi)[(0, 0)];
        let den = psi.norm_squared();
        x[particle] = spec.lambdas[k].re;
        p[particle] = num.re / den;
    }
    PhaseState::new(x, p, s.coupling())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particle_closed_form() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let e = exact_flow(&s, 2.0).unwrap();
        let r2 = 2f64.sqrt();
        assert!((e.x()[0] - r2).abs() < 1e-12 && (e.x()[1] + r2).abs() < 1e-12);
        let v = 1.0 / (2.0 * r2);
        assert!((e.p()[0] - v).abs() < 1e-12 && (e.p()[1] + v).abs() < 1e-12);
    }

    #[test]
    fn identity_and_reversal() {
        let s = PhaseState::new(
            vec![0.3, -1.1, 2.0],
            vec![0.4, 0.1, -0.6],
            Coupling::Imaginary,
        )
        .unwrap();
        assert_eq!(exact_flow(&s, 0.0).unwrap(), s);
        let back = exact_flow(&exact_flow(&s, 1.7).unwrap(), -1.7).unwrap();
        for (a, b) in back.coords().iter().zip(s.coords()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn free_particle_and_real_coupling() {
        let s = PhaseState::new(vec![2.0], vec![-0.5], Coupling::Imaginary).unwrap();
        let e = exact_flow(&s, 4.0).unwrap();
        assert!((e.x()[0]).abs() < 1e-15 && (e.p()[0] + 0.5).abs() < 1e-15);
        let r = PhaseState::new(vec![2.0, 0.0], vec![0.0, 0.0], Coupling::Real).unwrap();
        assert!(matches!(
            exact_flow(&r, 1.0),
            Err(Error::CouplingUnsupported(_))
        ));
    }
}
