use nalgebra::Schur;
use num_complex::Complex64;
use serde::Serialize;

use super::observable::{FnMatrixObservable, MatrixBuiltin, MatrixObservable};
use super::point::LiftedPoint;
use super::{bracket0_grads, bracket1_grads, bracket_pencil};
use crate::error::{Error, Result};
use crate::poisson::BracketReport;
use crate::CMatrix;

/// Eigenvalues of `N*` closer than this (relative to `max(1, |A|)`) are one
/// cluster; also the tolerance of the match against `spec(A)`.
pub const NIJENHUIS_CLUSTER_TOLERANCE: f64 = 1e-6;

const MAX_BRUTE_FORCE_N: usize = 3;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Precondition(format!(
            "brute-force lifted checks are limited to n <= {MAX_BRUTE_FORCE_N}"
        )));
    }
    Ok(())
}

/// All unordered triples of distinct coordinate indices.
pub fn jacobi_triples(n: usize) -> Vec<[usize; 3]> {
    let m = 2 * n * n;
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                out.push([a, b, c]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiResult {
    pub lambda: f64,
    pub triples: usize,
    pub max_residual: f64,
}

/// Largest cyclic Jacobi sum of `{.,.}_0 + lambda {.,.}_1` over coordinate
/// triples.
///
/// Uses every triple when `trials` covers them all, otherwise an evenly
/// strided deterministic subset of `trials` triples. The outer bracket
/// differentiates the inner bracket's value numerically.
pub fn jacobi_check(lambda: f64, pt: &LiftedPoint, trials: usize) -> Result<JacobiResult> {
    let n = pt.n();
    check_size(n)?;
    let coords = MatrixBuiltin::coordinates(n);
    let all = jacobi_triples(n);
    let chosen: Vec<[usize; 3]> = if trials >= all.len() {
        all
    } else {
        (0..trials).map(|k| all[k * all.len() / trials]).collect()
    };
    let nested = |f: MatrixBuiltin, g: MatrixBuiltin, h: MatrixBuiltin| -> Result<Complex64> {
        let inner = FnMatrixObservable::new(
            format!("{{{}, {}}}", f.name(), g.name()),
            move |p: &LiftedPoint| bracket_pencil(lambda, &f, &g, p),
        );
        bracket_pencil(lambda, &inner, &h, pt)
    };
    let mut worst = 0.0f64;
    for &[a, b, c] in &chosen {
        let (f, g, h) = (coords[a], coords[b], coords[c]);
        let sum = nested(f, g, h)? + nested(g, h, f)? + nested(h, f, g)?;
        worst = worst.max(sum.norm());
    }
    Ok(JacobiResult {
        lambda,
        triples: chosen.len(),
        max_residual: worst,
    })
}

/// For `k = 1..=k_max` and every coordinate function `f`:
/// the field of `H_k` is `(0, A^(k-1))`, i.e. `{H_k, f}_0 = tr(Fb A^(k-1))`,
/// and the Lenard relation `{f, H_(k+1)}_0 = {f, H_k}_1` holds.
pub fn hierarchy_check(pt: &LiftedPoint, k_max: usize, tolerance: f64) -> Result<BracketReport> {
    let n = pt.n();
    if k_max == 0 || k_max > n {
        return Err(Error::Precondition(format!("k_max must lie in 1..={n}")));
    }
    let mut r = BracketReport::new("lift hierarchy", tolerance, false);
    let coords = MatrixBuiltin::coordinates(n);
    for k in 1..=k_max {
        let dh = MatrixBuiltin::H(k).gradient(pt)?;
        let dh_next = MatrixBuiltin::H(k + 1).gradient(pt)?;
        let field = pt.a.pow(k as u32 - 1);
        for (idx, f) in coords.iter().enumerate() {
            let df = f.gradient(pt)?;
            let pairing = (&df.1 * &field).trace();
            r.push(
                format!("{{H_k, {}}}_0 = <df, (0, A^(k-1))>", f.name()),
                k,
                idx,
                bracket0_grads(&dh, &df),
                pairing,
            );
            let lhs = bracket0_grads(&df, &dh_next);
            let rhs = bracket1_grads(pt, &df, &dh);
            r.push(
                format!("{{{}, H_(k+1)}}_0 = {{{}, H_k}}_1", f.name(), f.name()),
                k,
                idx,
                lhs,
                rhs,
            );
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NijenhuisReport {
    pub spectrum_a: Vec<Complex64>,
    pub clusters: Vec<EigenCluster>,
    /// Largest distance between a cluster and the nearest eigenvalue of `A`
    /// and vice versa.
    pub max_deviation: f64,
    pub even_multiplicity: bool,
    /// `A` itself has eigenvalues closer than the cluster tolerance.
    pub degenerate: bool,
    pub tolerance: f64,
    pub pass: bool,
}

/// Spectrum of `N* = P0^-1 P1` on covectors, assembled from the brackets
/// of the coordinate functions, against the spectrum of `A`.
pub fn nijenhuis_spectrum_check(pt: &LiftedPoint) -> Result<NijenhuisReport> {
    let n = pt.n();
    check_size(n)?;
    let coords = MatrixBuiltin::coordinates(n);
    let grads: Vec<(CMatrix, CMatrix)> = coords
        .iter()
        .map(|f| f.gradient(pt))
        .collect::<Result<_>>()?;
    let m = grads.len();
    let p0 = CMatrix::from_fn(m, m, |a, b| bracket0_grads(&grads[a], &grads[b]));
    let p1 = CMatrix::from_fn(m, m, |a, b| bracket1_grads(pt, &grads[a], &grads[b]));
    let nstar = p0
        .lu()
        .solve(&p1)
        .ok_or_else(|| Error::Precondition("P0 is singular".into()))?;
    let eig_n = eigenvalues(&nstar);
    let spectrum_a = eigenvalues(&pt.a);

    let scale = pt.a.map(|z| z.norm()).max().max(1.0);
    let tol = NIJENHUIS_CLUSTER_TOLERANCE * scale;
    let clusters = cluster(&eig_n, tol);
    let a_clusters = cluster(&spectrum_a, tol);
    let degenerate = a_clusters.len() < n;

    let nearest = |z: Complex64, set: &mut dyn Iterator<Item = Complex64>| {
        set.map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
    };
    let mut max_deviation = 0.0f64;
    for c in &clusters {
        max_deviation = max_deviation.max(nearest(c.value, &mut spectrum_a.iter().copied()));
    }
    for &z in &spectrum_a {
        max_deviation = max_deviation.max(nearest(z, &mut clusters.iter().map(|c| c.value)));
    }
    let even_multiplicity = clusters.iter().all(|c| c.multiplicity % 2 == 0);
    Ok(NijenhuisReport {
        spectrum_a,
        clusters,
        max_deviation,
        even_multiplicity,
        degenerate,
        tolerance: tol,
        pass: max_deviation <= tol && even_multiplicity,
    })
}

fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    Schur::new(m.clone())
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect()
}

fn cluster(values: &[Complex64], tol: f64) -> Vec<EigenCluster> {
    let mut sums: Vec<(Complex64, usize)> = Vec::new();
    for &z in values {
        match sums
            .iter_mut()
            .find(|(s, k)| (*s / *k as f64 - z).norm() <= tol)
        {
            Some((s, k)) => {
                *s += z;
                *k += 1;
            }
            None => sums.push((z, 1)),
        }
    }
    sums.into_iter()
        .map(|(s, k)| EigenCluster {
            value: s / k as f64,
            multiplicity: k,
        })
        .collect()
}
