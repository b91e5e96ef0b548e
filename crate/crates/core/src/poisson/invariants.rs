use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::build_lax;
use crate::state::PhaseState;
use crate::CMatrix;

/// `I_k = tr(L^k) / k` and `J_k = tr(X L^(k-1))` for `k = 1..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantBasis {
    #[serde(rename = "I")]
    pub i: Vec<Complex64>,
    #[serde(rename = "J")]
    pub j: Vec<Complex64>,
}

impl InvariantBasis {
    /// Highest power stored.
    pub fn len(&self) -> usize {
        self.i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty()
    }

    /// `I_k`, 1-based.
    pub fn i(&self, k: usize) -> Complex64 {
        self.i[k - 1]
    }

    /// `J_k`, 1-based.
    pub fn j(&self, k: usize) -> Complex64 {
        self.j[k - 1]
    }
}

/// The `2n` chart functions at a state.
pub fn invariants_ij(s: &PhaseState) -> Result<InvariantBasis> {
    invariants_ij_upto(s, s.n())
}

/// `I_k`, `J_k` for `k = 1..=m`, including `m > n` (used by the bracket tables,
/// whose right-hand sides reach `I_(2n-1)`).
pub fn invariants_ij_upto(s: &PhaseState, m: usize) -> Result<InvariantBasis> {
    let pair = build_lax(s)?;
    let n = s.n();
    let x = pair.x_matrix();
    let mut i = Vec::with_capacity(m);
    let mut j = Vec::with_capacity(m);
    // power = L^(k-1)
    let mut power = CMatrix::identity(n, n);
    for k in 1..=m {
        j.push((&x * &power).trace());
        power = &power * &pair.l;
        i.push(power.trace() / k as f64);
    }
    Ok(InvariantBasis { i, j })
}

/// One gradient per power, each in `(x, p)` layout.
pub type Gradients = Vec<Vec<Complex64>>;

/// Exact gradients `(dI_k, dJ_k)` for `k = 1..=m` in `(x, p)` layout.
///
/// With `dL/dp_m = E_mm` and `dL/dx_m` supported on row and column `m`,
/// `d tr(M L) = tr(M dL)` gives
/// `dp_m: M_mm` and `dx_m: c sum_(j != m) (M_mj - M_jm) / (x_m - x_j)^2`,
/// where `M = L^(k-1)` for `I_k` and `M = sum_a L^(k-2-a) X L^a` for `J_k`
/// (plus `(L^(k-1))_mm` on `dx_m` from `X` itself).
pub fn invariant_gradients(s: &PhaseState, m: usize) -> Result<(Gradients, Gradients)> {
    let pair = build_lax(s)?;
    let n = s.n();
    let c = s.coupling().c();
    let x = s.x();
    let x_mat = pair.x_matrix();
    let contract = |mat: &CMatrix| -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); 2 * n];
        for a in 0..n {
            let mut dx = Complex64::new(0.0, 0.0);
            for b in (0..n).filter(|&b| b != a) {
                let d = x[a] - x[b];
                dx += (mat[(a, b)] - mat[(b, a)]) / (d * d);
            }
            g[a] = c * dx;
            g[n + a] = mat[(a, a)];
        }
        g
    };
    let mut di = Vec::with_capacity(m);
    let mut dj = Vec::with_capacity(m);
    // power = L^(k-1), mixed = sum_a L^(k-2-a) X L^a
    let mut power = CMatrix::identity(n, n);
    let mut mixed = CMatrix::zeros(n, n);
    for _ in 1..=m {
        di.push(contract(&power));
        let mut g = contract(&mixed);
        for a in 0..n {
            g[a] += power[(a, a)];
        }
        dj.push(g);
        mixed = &pair.l * &mixed + &x_mat * &power;
        power = &power * &pair.l;
    }
    Ok((di, dj))
}

/// `Gamma_l = l J_2 I_l - 2 J_l I_2`, defined for `1 <= l <= n`, `l != 2`.
pub fn gamma(s: &PhaseState, ell: usize) -> Result<Complex64> {
    let n = s.n();
    if n < 2 || ell == 0 || ell == 2 || ell > n {
        return Err(Error::IndexOutOfRange { index: ell, n });
    }
    let inv = invariants_ij(s)?;
    Ok(inv.j(2) * inv.i(ell) * ell as f64 - inv.j(ell) * inv.i(2) * 2.0)
}
