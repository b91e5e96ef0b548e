//! Eigen-decomposition of the Lax matrix with left and right eigenvectors.

use nalgebra::{DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::state::Coupling;
use crate::CMatrix;

/// Relative factor of the degeneracy threshold `delta_gap = 1e-6 max(1, ‖L‖)`.
pub const GAP_FACTOR: f64 = 1e-6;

/// Real parts closer than this (relative to `max(1, ‖L‖)`) count as tied.
const TIE_FACTOR: f64 = 1e-9;

/// Sorted eigenvalues of `L` with matching eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub lambdas: Vec<Complex64>,
    /// `L psi_i = lambda_i psi_i`, unit 2-norm.
    pub right: Vec<DVector<Complex64>>,
    /// `psi*_i^T L = lambda_i psi*_i^T`, unit 2-norm.
    pub left: Vec<DVector<Complex64>>,
    pub min_gap: f64,
    /// Threshold that `min_gap` was compared against.
    pub gap_threshold: f64,
    pub degenerate: bool,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }
}

/// Frobenius norm used for all scale-relative thresholds on `L`.
pub fn matrix_scale(l: &CMatrix) -> f64 {
    l.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Degeneracy threshold for a given matrix.
pub fn gap_threshold(l: &CMatrix) -> f64 {
    GAP_FACTOR * matrix_scale(l).max(1.0)
}

/// Eigen-decomposition of `L`.
///
/// `IMAGINARY` coupling makes `L` Hermitian, so the self-adjoint solver is
/// used and the left vectors are the conjugated right vectors. Otherwise the
/// eigenvalues come from a complex Schur form and each eigenvector is the
/// smallest right singular vector of `L - lambda I` (resp. its transpose).
pub fn eigen(l: &CMatrix, coupling: Coupling) -> Spectrum {
    let n = l.nrows();
    let scale = matrix_scale(l).max(1.0);
    let (lambdas, right, left) = match coupling {
        Coupling::Imaginary => hermitian(l),
        Coupling::Real => general(l),
    };
    let order = spectral_order(&lambdas, TIE_FACTOR * scale);
    let lambdas: Vec<_> = order.iter().map(|&k| lambdas[k]).collect();
    let right: Vec<_> = order.iter().map(|&k| right[k].clone()).collect();
    let left: Vec<_> = order.iter().map(|&k| left[k].clone()).collect();

    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((lambdas[i] - lambdas[j]).norm());
        }
    }
    let threshold = GAP_FACTOR * scale;
    Spectrum {
        lambdas,
        right,
        left,
        min_gap,
        gap_threshold: threshold,
        degenerate: min_gap < threshold,
    }
}

/// Permutation sorting by real part, then imaginary part.
///
/// Real parts within `tie` of the first member of a run are grouped and the
/// group is ordered by imaginary part, which keeps conjugate pairs stable.
pub fn spectral_order(values: &[Complex64], tie: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - anchor <= tie {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
        out.extend(group);
        start = end;
    }
    out
}

type Decomposition = (
    Vec<Complex64>,
    Vec<DVector<Complex64>>,
    Vec<DVector<Complex64>>,
);

fn hermitian(l: &CMatrix) -> Decomposition {
    // Symmetrise away rounding noise so the solver sees an exactly Hermitian input.
    let h = (l + l.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = l.nrows();
    let mut lambdas = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for k in 0..n {
        lambdas.push(Complex64::new(eig.eigenvalues[k], 0.0));
        let v: DVector<Complex64> = eig.eigenvectors.column(k).into_owned();
        left.push(v.map(|z| z.conj()));
        right.push(v);
    }
    (lambdas, right, left)
}

fn general(l: &CMatrix) -> Decomposition {
    let n = l.nrows();
    let lambdas: Vec<Complex64> = Schur::new(l.clone())
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect();
    let lt = l.transpose();
    let right = lambdas.iter().map(|&lam| null_vector(l, lam)).collect();
    let left = lambdas.iter().map(|&lam| null_vector(&lt, lam)).collect();
    debug_assert_eq!(lambdas.len(), n);
    (lambdas, right, left)
}

/// Unit vector minimising `‖(A - lambda I) v‖`.
fn null_vector(a: &CMatrix, lambda: Complex64) -> DVector<Complex64> {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    // Rows of V^H are conjugated right singular vectors.
    v_t.row(k).transpose().map(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::build_lax;
    use crate::state::PhaseState;

    fn residual(l: &CMatrix, s: &Spectrum) -> f64 {
        let scale = matrix_scale(l);
        (0..s.n())
            .map(|i| {
                let r = l * &s.right[i] - &s.right[i] * s.lambdas[i];
                let lr = l.transpose() * &s.left[i] - &s.left[i] * s.lambdas[i];
                (r.norm() + lr.norm()) / scale.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn test_state_imaginary() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let pair = build_lax(&s).unwrap();
        let sp = eigen(&pair.l, Coupling::Imaginary);
        assert!((sp.lambdas[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((sp.lambdas[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(!sp.degenerate);
        assert!((sp.min_gap - 1.0).abs() < 1e-14);
        assert!(residual(&pair.l, &sp) < 1e-14);
    }

    #[test]
    fn test_state_real_is_complex_pair() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Real).unwrap();
        let pair = build_lax(&s).unwrap();
        let sp = eigen(&pair.l, Coupling::Real);
        assert!((sp.lambdas[0] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((sp.lambdas[1] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        assert!(!sp.degenerate);
        assert!((sp.min_gap - 1.0).abs() < 1e-14);
        assert!(residual(&pair.l, &sp) < 1e-13);
    }

    #[test]
    fn single_particle() {
        let s = PhaseState::new(vec![0.3], vec![-2.0], Coupling::Real).unwrap();
        let pair = build_lax(&s).unwrap();
        for coupling in [Coupling::Real, Coupling::Imaginary] {
            let sp = eigen(&pair.l, coupling);
            assert_eq!(sp.lambdas, vec![Complex64::new(-2.0, 0.0)]);
            assert!(sp.min_gap.is_infinite());
            assert!(!sp.degenerate);
        }
    }

    #[test]
    fn degenerate_flag() {
        let l = CMatrix::identity(3, 3);
        let sp = eigen(&l, Coupling::Imaginary);
        assert!(sp.degenerate);
    }

    #[test]
    fn tie_breaking_groups_conjugates() {
        let v = [
            Complex64::new(1.0 + 1e-15, 2.0),
            Complex64::new(1.0, -2.0),
            Complex64::new(-3.0, 0.0),
        ];
        assert_eq!(spectral_order(&v, 1e-9), vec![2, 1, 0]);
    }
}
