use num_complex::Complex64;

use super::point::LiftedPoint;
use crate::error::{Error, Result};
use crate::CMatrix;

/// Relative finite-difference step for matrix gradients.
pub const LIFT_FD_REL: f64 = 1e-6;

/// A scalar function of `(A, B)`.
pub trait MatrixObservable: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, pt: &LiftedPoint) -> Result<Complex64>;

    /// Trace gradients `(Fa, Fb)`; finite differences unless overridden.
    fn gradient(&self, pt: &LiftedPoint) -> Result<(CMatrix, CMatrix)> {
        matrix_gradient(self, pt)
    }
}

/// Central differences over all `2 n^2` entries, step
/// `LIFT_FD_REL * max(1, |entry|)` along the real axis (observables are
/// holomorphic in the entries).
pub fn matrix_gradient<F: MatrixObservable + ?Sized>(
    f: &F,
    pt: &LiftedPoint,
) -> Result<(CMatrix, CMatrix)> {
    let n = pt.n();
    let mut fa = CMatrix::zeros(n, n);
    let mut fb = CMatrix::zeros(n, n);
    for k in 0..2 * n * n {
        let h = LIFT_FD_REL * pt.coord(k).norm().max(1.0);
        let hc = Complex64::new(h, 0.0);
        let plus = f
            .eval(&pt.shifted(k, hc))
            .map_err(|e| Error::eval(f.name(), e))?;
        let minus = f
            .eval(&pt.shifted(k, -hc))
            .map_err(|e| Error::eval(f.name(), e))?;
        let d = (plus - minus) / (2.0 * h);
        let (m, r) = if k < n * n {
            (&mut fa, k)
        } else {
            (&mut fb, k - n * n)
        };
        // Trace-gradient convention: transpose of the entrywise derivative.
        m[(r % n, r / n)] = d;
    }
    Ok((fa, fb))
}

/// Observables with closed-form trace gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixBuiltin {
    EntryA(usize, usize),
    EntryB(usize, usize),
    TraceA,
    TraceB,
    /// `H_k = tr(A^k) / k`, 1-based.
    H(usize),
}

impl MatrixBuiltin {
    /// The `2n^2` coordinate functions, `A` entries first, row-major.
    pub fn coordinates(n: usize) -> Vec<MatrixBuiltin> {
        let a = (0..n * n).map(|r| MatrixBuiltin::EntryA(r / n, r % n));
        let b = (0..n * n).map(|r| MatrixBuiltin::EntryB(r / n, r % n));
        a.chain(b).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        match *self {
            MatrixBuiltin::EntryA(i, j) | MatrixBuiltin::EntryB(i, j) if i >= n || j >= n => {
                Err(Error::IndexOutOfRange { index: i.max(j), n })
            }
            MatrixBuiltin::H(0) => Err(Error::IndexOutOfRange { index: 0, n }),
            _ => Ok(()),
        }
    }
}

impl MatrixObservable for MatrixBuiltin {
    fn name(&self) -> String {
        match self {
            MatrixBuiltin::EntryA(i, j) => format!("A_{}{}", i + 1, j + 1),
            MatrixBuiltin::EntryB(i, j) => format!("B_{}{}", i + 1, j + 1),
            MatrixBuiltin::TraceA => "tr A".into(),
            MatrixBuiltin::TraceB => "tr B".into(),
            MatrixBuiltin::H(k) => format!("H_{k}"),
        }
    }

    fn eval(&self, pt: &LiftedPoint) -> Result<Complex64> {
        self.check(pt.n())?;
        Ok(match *self {
            MatrixBuiltin::EntryA(i, j) => pt.a[(i, j)],
            MatrixBuiltin::EntryB(i, j) => pt.b[(i, j)],
            MatrixBuiltin::TraceA => pt.a.trace(),
            MatrixBuiltin::TraceB => pt.b.trace(),
            MatrixBuiltin::H(k) => pt.a.pow(k as u32).trace() / k as f64,
        })
    }

    fn gradient(&self, pt: &LiftedPoint) -> Result<(CMatrix, CMatrix)> {
        let n = pt.n();
        self.check(n)?;
        let zero = CMatrix::zeros(n, n);
        let unit = |i: usize, j: usize| {
            let mut m = CMatrix::zeros(n, n);
            m[(j, i)] = Complex64::new(1.0, 0.0);
            m
        };
        Ok(match *self {
            MatrixBuiltin::EntryA(i, j) => (unit(i, j), zero),
            MatrixBuiltin::EntryB(i, j) => (zero, unit(i, j)),
            MatrixBuiltin::TraceA => (CMatrix::identity(n, n), zero),
            MatrixBuiltin::TraceB => (zero, CMatrix::identity(n, n)),
            MatrixBuiltin::H(k) => (pt.a.pow(k as u32 - 1), zero),
        })
    }
}

/// A matrix observable backed by a closure; gradients by finite differences.
pub struct FnMatrixObservable<F> {
    name: String,
    f: F,
}

impl<F> FnMatrixObservable<F>
where
    F: Fn(&LiftedPoint) -> Result<Complex64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnMatrixObservable {
            name: name.into(),
            f,
        }
    }
}

impl<F> MatrixObservable for FnMatrixObservable<F>
where
    F: Fn(&LiftedPoint) -> Result<Complex64> + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, pt: &LiftedPoint) -> Result<Complex64> {
        (self.f)(pt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::point::random_lifted_point;
    use crate::sample::seeded_rng;

    #[test]
    fn closed_form_gradients_match_differences() {
        let pt = random_lifted_point(&mut seeded_rng(11), 3);
        let mut all = MatrixBuiltin::coordinates(3);
        all.extend([
            MatrixBuiltin::TraceA,
            MatrixBuiltin::TraceB,
            MatrixBuiltin::H(1),
            MatrixBuiltin::H(4),
        ]);
        for f in all {
            let (ea, eb) = f.gradient(&pt).unwrap();
            let (da, db) = matrix_gradient(&f, &pt).unwrap();
            let err = (ea - da)
                .map(|z| z.norm())
                .max()
                .max((eb - db).map(|z| z.norm()).max());
            assert!(err < 1e-8, "{}: {err:e}", f.name());
        }
    }

    #[test]
    fn index_checks() {
        let pt = random_lifted_point(&mut seeded_rng(1), 2);
        assert!(matches!(
            MatrixBuiltin::EntryA(2, 0).eval(&pt),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            MatrixBuiltin::H(0).gradient(&pt),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(MatrixBuiltin::coordinates(2).len(), 8);
    }
}
