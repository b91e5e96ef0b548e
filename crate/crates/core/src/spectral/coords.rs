//! Generating functions `G`, `E` and the spectral canonical coordinates.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::charpoly::{delta_derivatives, faddeev_leverrier, CharData};
use super::eigen::{eigen, Spectrum};
use crate::error::{Error, Result};
use crate::lax::LaxPair;

/// Tolerance on `e^T adj(lambda_i) e = Delta'(lambda_i)`, relative to `|Delta'|`.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-9;

/// Eigenvalues of `L` with their DN momenta `mu` and MDN momenta `mu_tilde`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoords {
    #[serde(rename = "lambda")]
    pub lambdas: Vec<Complex64>,
    pub mu: Vec<Complex64>,
    pub mu_tilde: Vec<Complex64>,
    pub min_gap: f64,
    pub degenerate: bool,
}

impl SpectralCoords {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// Applies a branch permutation: entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SpectralCoords {
        SpectralCoords {
            lambdas: perm.iter().map(|&k| self.lambdas[k]).collect(),
            mu: perm.iter().map(|&k| self.mu[k]).collect(),
            mu_tilde: perm.iter().map(|&k| self.mu_tilde[k]).collect(),
            min_gap: self.min_gap,
            degenerate: self.degenerate,
        }
    }
}

/// `G(lambda) = tr(X adj(lambda))`.
pub fn gen_g(char: &CharData, x: &DVector<f64>, lambda: Complex64) -> Complex64 {
    let adj = char.adjugate_at(lambda);
    x.iter().enumerate().map(|(i, &xi)| adj[(i, i)] * xi).sum()
}

/// `E(lambda) = x^T adj(lambda) e`.
pub fn gen_e(char: &CharData, x: &DVector<f64>, lambda: Complex64) -> Complex64 {
    let adj = char.adjugate_at(lambda);
    x.iter()
        .enumerate()
        .map(|(i, &xi)| adj.row(i).iter().sum::<Complex64>() * xi)
        .sum()
}

/// `e^T adj(lambda) e`.
pub fn gen_e_denominator(char: &CharData, lambda: Complex64) -> Complex64 {
    char.adjugate_at(lambda).iter().sum()
}

/// Relative residual of `e^T adj(lambda) e = Delta'(lambda)`.
pub fn denominator_residual(char: &CharData, lambda: Complex64) -> f64 {
    let (_, d1, _) = delta_derivatives(char, lambda);
    (gen_e_denominator(char, lambda) - d1).norm() / d1.norm().max(f64::MIN_POSITIVE)
}

/// Spectral coordinates through the adjugate route.
///
/// `mu_i = G(lambda_i) / Delta'(lambda_i)` and
/// `mu_tilde_i = E(lambda_i) / Delta'(lambda_i)`.
pub fn spectral_coords(pair: &LaxPair) -> Result<SpectralCoords> {
    let char = faddeev_leverrier(&pair.l);
    let spectrum = eigen(&pair.l, pair.coupling());
    spectral_coords_from(pair, &char, &spectrum)
}

/// As [`spectral_coords`] with precomputed characteristic data and spectrum.
pub fn spectral_coords_from(
    pair: &LaxPair,
    char: &CharData,
    spectrum: &Spectrum,
) -> Result<SpectralCoords> {
    if spectrum.degenerate {
        return Err(Error::DegenerateSpectrum {
            min_gap: spectrum.min_gap,
            threshold: spectrum.gap_threshold,
        });
    }
    let n = spectrum.n();
    let mut mu = Vec::with_capacity(n);
    let mut mu_tilde = Vec::with_capacity(n);
    for &lam in &spectrum.lambdas {
        let (_, d1, _) = delta_derivatives(char, lam);
        let adj = char.adjugate_at(lam);
        let g: Complex64 = pair
            .x
            .iter()
            .enumerate()
            .map(|(i, &xi)| adj[(i, i)] * xi)
            .sum();
        let e: Complex64 = pair
            .x
            .iter()
            .enumerate()
            .map(|(i, &xi)| adj.row(i).iter().sum::<Complex64>() * xi)
            .sum();
        let denom: Complex64 = adj.iter().sum();
        let residual = (denom - d1).norm() / d1.norm().max(f64::MIN_POSITIVE);
        if residual > DENOMINATOR_TOLERANCE {
            return Err(Error::IdentityViolation {
                what: "e^T adj(lambda_i) e = Delta'(lambda_i)".into(),
                residual,
            });
        }
        mu.push(g / d1);
        mu_tilde.push(e / d1);
    }
    Ok(SpectralCoords {
        lambdas: spectrum.lambdas.clone(),
        mu,
        mu_tilde,
        min_gap: spectrum.min_gap,
        degenerate: spectrum.degenerate,
    })
}

/// `mu_tilde_i = (x^T psi_i) / (e^T psi_i)` from the right eigenvectors.
pub fn eigenvector_coords(pair: &LaxPair) -> Result<Vec<Complex64>> {
    let spectrum = eigen(&pair.l, pair.coupling());
    eigenvector_coords_from(pair, &spectrum)
}

pub fn eigenvector_coords_from(pair: &LaxPair, spectrum: &Spectrum) -> Result<Vec<Complex64>> {
    if spectrum.degenerate {
        return Err(Error::DegenerateSpectrum {
            min_gap: spectrum.min_gap,
            threshold: spectrum.gap_threshold,
        });
    }
    spectrum
        .right
        .iter()
        .enumerate()
        .map(|(index, psi)| {
            let e_psi: Complex64 = psi.iter().sum();
            if e_psi.norm() < 1e-12 * psi.norm() {
                return Err(Error::NormalizationFailure { index });
            }
            let x_psi: Complex64 = pair.x.iter().zip(psi.iter()).map(|(&xi, &z)| z * xi).sum();
            Ok(x_psi / e_psi)
        })
        .collect()
}

/// `n + 1` distinct complex probe points, enough to pin down any polynomial
/// identity of degree `n` in `lambda`.
pub fn default_probes(n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| Complex64::from_polar(1.0 + 0.37 * k as f64, 0.9 * k as f64 + 0.3))
        .collect()
}

/// `max |E - G - 1/2 Delta''| / max(1, |Delta''|)` over the probe points.
pub fn conjecture_residual(pair: &LaxPair, probes: &[Complex64]) -> f64 {
    conjecture_residual_scaled(pair, probes, Complex64::new(1.0, 0.0))
}

/// As [`conjecture_residual`] with `1/2 Delta''` multiplied by `factor`.
pub fn conjecture_residual_scaled(pair: &LaxPair, probes: &[Complex64], factor: Complex64) -> f64 {
    let char = faddeev_leverrier(&pair.l);
    probes
        .iter()
        .map(|&lam| {
            let e = gen_e(&char, &pair.x, lam);
            let g = gen_g(&char, &pair.x, lam);
            let (_, _, d2) = delta_derivatives(&char, lam);
            (e - g - factor * d2 * 0.5).norm() / d2.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::build_lax;
    use crate::state::{Coupling, PhaseState};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair(x: &[f64], p: &[f64], coupling: Coupling) -> LaxPair {
        build_lax(&PhaseState::new(x.to_vec(), p.to_vec(), coupling).unwrap()).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn generators_single_particle() {
        let pr = pair(&[5.0], &[3.0], Coupling::Imaginary);
        let ch = faddeev_leverrier(&pr.l);
        for lam in [c(0.0, 0.0), c(2.0, -1.0)] {
            assert_eq!(gen_g(&ch, &pr.x, lam), c(5.0, 0.0));
            assert_eq!(gen_e(&ch, &pr.x, lam), c(5.0, 0.0));
        }
    }

    #[test]
    fn generators_test_state() {
        for (coupling, e_value) in [
            (Coupling::Imaginary, c(0.0, 1.0)),
            (Coupling::Real, c(1.0, 0.0)),
        ] {
            let pr = pair(&[1.0, -1.0], &[0.0, 0.0], coupling);
            let ch = faddeev_leverrier(&pr.l);
            for lam in [c(0.0, 0.0), c(0.7, 0.0), c(-3.0, 2.0)] {
                assert!(close(gen_g(&ch, &pr.x, lam), c(0.0, 0.0), 1e-15));
                assert!(close(gen_e(&ch, &pr.x, lam), e_value, 1e-15));
            }
        }
    }

    #[test]
    fn generator_g_shifted_state() {
        let pr = pair(&[2.0, 0.0], &[1.0, 0.0], Coupling::Imaginary);
        let ch = faddeev_leverrier(&pr.l);
        for lam in [0.0, 1.5, -2.0] {
            assert!(close(
                gen_g(&ch, &pr.x, c(lam, 0.0)),
                c(2.0 * lam, 0.0),
                1e-14
            ));
        }
    }

    #[test]
    fn coords_single_particle() {
        let sc = spectral_coords(&pair(&[5.0], &[3.0], Coupling::Imaginary)).unwrap();
        assert_eq!(sc.lambdas, vec![c(3.0, 0.0)]);
        assert_eq!(sc.mu, vec![c(5.0, 0.0)]);
        assert_eq!(sc.mu_tilde, vec![c(5.0, 0.0)]);
    }

    #[test]
    fn coords_test_state() {
        let pr = pair(&[1.0, -1.0], &[0.0, 0.0], Coupling::Imaginary);
        let sc = spectral_coords(&pr).unwrap();
        assert!(close(sc.lambdas[0], c(-0.5, 0.0), 1e-15));
        assert!(close(sc.lambdas[1], c(0.5, 0.0), 1e-15));
        assert!(close(sc.mu[0], c(0.0, 0.0), 1e-15));
        assert!(close(sc.mu[1], c(0.0, 0.0), 1e-15));
        assert!(close(sc.mu_tilde[0], c(0.0, -1.0), 1e-14));
        assert!(close(sc.mu_tilde[1], c(0.0, 1.0), 1e-14));
        let ev = eigenvector_coords(&pr).unwrap();
        assert!(close(ev[1], c(0.0, 1.0), 1e-14));
        assert!(close(ev[0], c(0.0, -1.0), 1e-14));
    }

    #[test]
    fn coords_shifted_state_match_eigenvector_route() {
        let pr = pair(&[2.0, 0.0], &[0.0, 0.0], Coupling::Imaginary);
        let sc = spectral_coords(&pr).unwrap();
        let ev = eigenvector_coords(&pr).unwrap();
        for (a, b) in sc.mu_tilde.iter().zip(&ev) {
            assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        }
        // Translation by +1 shifts every momentum by +1.
        assert!(close(sc.mu_tilde[0], c(1.0, -1.0), 1e-13));
        assert!(close(sc.mu_tilde[1], c(1.0, 1.0), 1e-13));
    }

    #[test]
    fn degenerate_rejected() {
        let pr = pair(&[1.0, -1.0, 0.0], &[0.0, 0.0, 0.0], Coupling::Imaginary);
        // Symmetric three-body state at rest has spectrum {-a, 0, a}: fine.
        assert!(spectral_coords(&pr).is_ok());
        let mut l = pr.clone();
        l.l = crate::CMatrix::identity(3, 3);
        assert!(matches!(
            spectral_coords(&l),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            eigenvector_coords(&l),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn conjecture_small_cases() {
        let probes = [c(0.0, 0.0), c(1.0, 0.0), c(-2.0, 0.5)];
        let real = pair(&[1.0, -1.0], &[0.0, 0.0], Coupling::Real);
        assert!(conjecture_residual(&real, &probes) < 1e-15);
        let single = pair(&[0.4], &[1.0], Coupling::Imaginary);
        assert_eq!(conjecture_residual(&single, &probes), 0.0);
        let imag = pair(&[1.0, -1.0], &[0.0, 0.0], Coupling::Imaginary);
        let r = conjecture_residual(&imag, &probes);
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14, "{r}");
        assert!(conjecture_residual_scaled(&imag, &probes, c(0.0, 1.0)) < 1e-15);
    }
}
