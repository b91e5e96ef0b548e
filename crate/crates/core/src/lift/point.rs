use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::CMatrix;

/// A point `(A, B)` of `gl(n) x gl(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl LiftedPoint {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() || a.nrows() == 0 {
            return Err(Error::InvalidInput(
                "A and B must be square of the same size".into(),
            ));
        }
        if a.iter()
            .chain(b.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(LiftedPoint { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Coordinate `k` in the order `A_00, A_01, .., A_(n-1)(n-1), B_00, ..`.
    pub fn coord(&self, k: usize) -> Complex64 {
        let n = self.n();
        let (m, r) = if k < n * n {
            (&self.a, k)
        } else {
            (&self.b, k - n * n)
        };
        m[(r / n, r % n)]
    }

    /// The point with coordinate `k` shifted by `delta`.
    pub fn shifted(&self, k: usize, delta: Complex64) -> LiftedPoint {
        let n = self.n();
        let mut out = self.clone();
        let (m, r) = if k < n * n {
            (&mut out.a, k)
        } else {
            (&mut out.b, k - n * n)
        };
        m[(r / n, r % n)] += delta;
        out
    }
}

/// Entries uniform on the unit square `[-1, 1] + i[-1, 1]`.
pub fn random_lifted_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LiftedPoint {
    let mut draw = || Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
    let a = CMatrix::from_fn(n, n, |_, _| draw());
    let b = CMatrix::from_fn(n, n, |_, _| draw());
    LiftedPoint { a, b }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Complex64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Complex64>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn matrix(n: usize, rows: &[Vec<Complex64>], name: &str) -> std::result::Result<CMatrix, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("{name} is not {n} x {n}"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl Serialize for LiftedPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            n: self.n(),
            a: rows(&self.a),
            b: rows(&self.b),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LiftedPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = Repr::deserialize(deserializer)?;
        let a = matrix(r.n, &r.a, "A").map_err(D::Error::custom)?;
        let b = matrix(r.n, &r.b, "B").map_err(D::Error::custom)?;
        LiftedPoint::new(a, b).map_err(D::Error::custom)
    }
}
