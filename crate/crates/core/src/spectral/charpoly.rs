//! Characteristic polynomial and adjugate polynomial via Faddeev-LeVerrier.

use num_complex::Complex64;

use crate::CMatrix;

/// `det(lambda I - L)` together with the polynomial adjugate
/// `(lambda I - L)^adj = sum_k lambda^k M_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharData {
    /// Monic coefficients, lowest degree first: `delta[n] == 1`.
    pub delta: Vec<Complex64>,
    /// `adj[k]` multiplies `lambda^k`; `adj[n - 1]` is the identity.
    pub adj: Vec<CMatrix>,
}

impl CharData {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// The adjugate `(lambda I - L)^adj`, evaluated by Horner's rule.
    pub fn adjugate_at(&self, lambda: Complex64) -> CMatrix {
        let n = self.n();
        let mut acc = CMatrix::zeros(n, n);
        for m in self.adj.iter().rev() {
            acc = acc * lambda + m;
        }
        acc
    }

    pub fn det_at(&self, lambda: Complex64) -> Complex64 {
        delta_derivatives(self, lambda).0
    }

    /// Relative residual of `(lambda I - L) adj(lambda) = det(lambda) I`.
    ///
    /// Normalised by `max(1, |det|, ‖lambda I - L‖ ‖adj‖)` in the max-entry norm.
    pub fn identity_residual(&self, l: &CMatrix, lambda: Complex64) -> f64 {
        let n = self.n();
        let shifted = CMatrix::identity(n, n) * lambda - l;
        let adj = self.adjugate_at(lambda);
        let det = self.det_at(lambda);
        let lhs = &shifted * &adj;
        let diff = lhs - CMatrix::identity(n, n) * det;
        let scale = 1f64
            .max(det.norm())
            .max(max_abs(&shifted) * max_abs(&adj) * n as f64);
        max_abs(&diff) / scale
    }
}

/// Faddeev-LeVerrier recursion.
///
/// `M_{n-1} = I`, then for `k = n-1, ..., 0`:
/// `c_k = -tr(L M_k) / (n - k)` and `M_{k-1} = L M_k + c_k I`.
/// Only divisions by integers occur. Cost is `O(n^4)`.
pub fn faddeev_leverrier(l: &CMatrix) -> CharData {
    let n = l.nrows();
    assert_eq!(n, l.ncols(), "faddeev_leverrier needs a square matrix");
    let mut delta = vec![Complex64::new(0.0, 0.0); n + 1];
    delta[n] = Complex64::new(1.0, 0.0);
    let mut adj = vec![CMatrix::zeros(n, n); n];
    if n == 0 {
        return CharData { delta, adj };
    }
    adj[n - 1] = CMatrix::identity(n, n);
    for k in (0..n).rev() {
        let lm = l * &adj[k];
        let ck = -lm.trace() / (n - k) as f64;
        delta[k] = ck;
        if k > 0 {
            adj[k - 1] = lm + CMatrix::identity(n, n) * ck;
        }
    }
    CharData { delta, adj }
}

/// `(Delta, Delta', Delta'')` at `lambda`, by a three-lane Horner scheme.
pub fn delta_derivatives(char: &CharData, lambda: Complex64) -> (Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut d0, mut d1, mut d2) = (zero, zero, zero);
    for &a in char.delta.iter().rev() {
        d2 = d2 * lambda + d1 * 2.0;
        d1 = d1 * lambda + d0;
        d0 = d0 * lambda + a;
    }
    (d0, d1, d2)
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
