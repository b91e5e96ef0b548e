//! Verification suites for the bracket relations of the spectral coordinates.
//!
//! Every suite takes a state and a [`CheckConfig`] and returns a
//! [`BracketReport`]; numerical failures of a relation show up as a failed
//! report, while states outside a suite's domain (degenerate spectrum,
//! singular chart) are returned as errors.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bracket::{bracket0_grads, closed_form0, closed_form1, Generator, IjChart};
use super::gradient::{directional_derivative, gradient, jacobian, FdStep};
use super::invariants::invariant_gradients;
use super::observable::Builtin;
use super::report::BracketReport;
use crate::error::{Error, Result};
use crate::lax::{build_lax, commutation_residual};
use crate::spectral::{spectral_coords, SpectralCoords};
use crate::state::{Coupling, PhaseState};

/// Relative singular-value cut used for the independence rank.
const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub step: FdStep,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            step: FdStep::default(),
            tolerance: 1e-6,
        }
    }
}

impl CheckConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        CheckConfig {
            tolerance,
            ..Default::default()
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn one_particle() -> PhaseState {
    PhaseState::new(vec![0.3], vec![0.7], Coupling::Imaginary).expect("valid n=1 state")
}

fn unit_sign(v: Complex64) -> f64 {
    if v.re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Global sign `sigma` with `{lambda_i, mu_tilde_j}_0 = sigma delta_ij`,
/// read off once from a single particle where `lambda = p`, `mu_tilde = x`.
pub fn calibrated_sigma() -> f64 {
    static SIGMA: OnceLock<f64> = OnceLock::new();
    *SIGMA.get_or_init(|| {
        let s = one_particle();
        let step = FdStep::default();
        let dl = gradient(&Builtin::Lambda(0), &s, step).expect("n=1 gradient");
        let dm = gradient(&Builtin::MuTilde(0), &s, step).expect("n=1 gradient");
        unit_sign(bracket0_grads(&dl, &dm))
    })
}

/// Global sign `tau` of the response of the momenta to a uniform
/// translation of all positions, read off at a single particle (`mu = x`).
pub fn calibrated_tau() -> f64 {
    static TAU: OnceLock<f64> = OnceLock::new();
    *TAU.get_or_init(|| {
        let s = one_particle();
        let d = directional_derivative(
            |st| Ok(vec![Builtin::Mu(0).eval_unchecked(st)?]),
            &s,
            &[1.0, 0.0],
            FdStep::default(),
        )
        .expect("n=1 derivative");
        unit_sign(d[0])
    })
}

impl Builtin {
    fn eval_unchecked(&self, s: &PhaseState) -> Result<Complex64> {
        super::observable::Observable::eval(self, s)
    }
}

/// Spectral coordinates at a state with finite-difference gradients of every
/// `lambda_i`, `mu_i` and `mu_tilde_i`.
#[derive(Debug, Clone)]
pub struct SpectralGradients {
    pub coords: SpectralCoords,
    pub lambda: Vec<Vec<Complex64>>,
    pub mu: Vec<Vec<Complex64>>,
    pub mu_tilde: Vec<Vec<Complex64>>,
}

/// Gradients of the spectral coordinates.
///
/// Eigenvalues are re-sorted at every stencil point, so the stencil must stay
/// well inside the gap between eigenvalues; a stencil point whose spectrum
/// has drifted by more than a quarter of the base gap is reported as an
/// evaluation failure instead of silently mixing branches.
pub fn spectral_gradients(s: &PhaseState, step: FdStep) -> Result<SpectralGradients> {
    let coords = spectral_coords(&build_lax(s)?)?;
    let n = s.n();
    let base = coords.lambdas.clone();
    let guard = if n > 1 {
        coords.min_gap / 4.0
    } else {
        f64::INFINITY
    };
    let rows = jacobian(
        |st| {
            let sc = spectral_coords(&build_lax(st)?)?;
            if let Some(k) = (0..n).find(|&k| (sc.lambdas[k] - base[k]).norm() > guard) {
                return Err(Error::eval(
                    "spectral coordinates",
                    format!(
                        "eigenvalue branch {} moved by more than min_gap/4 inside the stencil",
                        k + 1
                    ),
                ));
            }
            Ok(sc
                .lambdas
                .iter()
                .chain(&sc.mu)
                .chain(&sc.mu_tilde)
                .copied()
                .collect())
        },
        s,
        step,
    )?;
    let mut rows = rows.into_iter();
    let lambda = rows.by_ref().take(n).collect();
    let mu = rows.by_ref().take(n).collect();
    let mu_tilde = rows.collect();
    Ok(SpectralGradients {
        coords,
        lambda,
        mu,
        mu_tilde,
    })
}

/// Max-norm of the commutation identity as a one-entry report.
pub fn verify_commutation(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let pair = build_lax(s)?;
    let mut r = BracketReport::new("commutation", cfg.tolerance, false);
    r.push(
        "[lambda - L, X] - c(ee^T - I)",
        0,
        0,
        c(commutation_residual(&pair)),
        c(0.0),
    );
    Ok(r)
}

/// Canonical relations of `(lambda, mu_tilde)` and `(lambda, mu)` under
/// `{.,.}_0`, absolute deviations.
pub fn verify_canonicity(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let g = spectral_gradients(s, cfg.step)?;
    let sigma = calibrated_sigma();
    let n = s.n();
    let mut r = BracketReport::new("canonicity", cfg.tolerance, false);
    r.note(format!("sigma = {sigma:+}"));
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { sigma } else { 0.0 };
            r.push(
                "{lambda_i, lambda_j}_0",
                i,
                j,
                bracket0_grads(&g.lambda[i], &g.lambda[j]),
                c(0.0),
            );
            r.push(
                "{mu_tilde_i, mu_tilde_j}_0",
                i,
                j,
                bracket0_grads(&g.mu_tilde[i], &g.mu_tilde[j]),
                c(0.0),
            );
            r.push(
                "{lambda_i, mu_tilde_j}_0",
                i,
                j,
                bracket0_grads(&g.lambda[i], &g.mu_tilde[j]),
                c(delta),
            );
            r.push(
                "{mu_i, mu_j}_0",
                i,
                j,
                bracket0_grads(&g.mu[i], &g.mu[j]),
                c(0.0),
            );
            r.push(
                "{lambda_i, mu_j}_0",
                i,
                j,
                bracket0_grads(&g.lambda[i], &g.mu[j]),
                c(delta),
            );
        }
    }
    Ok(r)
}

/// Relations under `{.,.}_1`: `{lambda, lambda}_1 = 0`,
/// `{lambda_i, mu_tilde_j}_1 = sigma delta_ij lambda_j`, antisymmetry of
/// `B = ({mu_tilde_i, mu_tilde_j}_1)`, `{mu_i, mu_j}_1 = 0`, and the
/// eigen-form `{mu_i, J_k}_1 = lambda_i {mu_i, J_k}_0`. Relative deviations.
pub fn verify_bracket1_relations(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let chart = IjChart::at(s)?;
    let g = spectral_gradients(s, cfg.step)?;
    let sigma = calibrated_sigma();
    let n = s.n();
    let lam = &g.coords.lambdas;
    let mut r = BracketReport::new("bracket1", cfg.tolerance, true);
    r.note(format!(
        "sigma = {sigma:+}, chart condition {:.3e}",
        chart.condition()
    ));
    let b1 = |a: &[Complex64], b: &[Complex64]| chart.bracket1_grads(a, b);
    let mut big_b = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { lam[j] * sigma } else { c(0.0) };
            r.push(
                "{lambda_i, lambda_j}_1",
                i,
                j,
                b1(&g.lambda[i], &g.lambda[j])?,
                c(0.0),
            );
            r.push(
                "{lambda_i, mu_tilde_j}_1",
                i,
                j,
                b1(&g.lambda[i], &g.mu_tilde[j])?,
                target,
            );
            r.push("{mu_i, mu_j}_1", i, j, b1(&g.mu[i], &g.mu[j])?, c(0.0));
            big_b[(i, j)] = b1(&g.mu_tilde[i], &g.mu_tilde[j])?;
        }
    }
    for i in 0..n {
        for j in i..n {
            r.push("B_ij + B_ji", i, j, big_b[(i, j)] + big_b[(j, i)], c(0.0));
        }
    }
    for k in 1..=n {
        let dj = chart.differential(Generator::J(k));
        for i in 0..n {
            let lhs = b1(&g.mu[i], &dj)?;
            let rhs = lam[i] * bracket0_grads(&g.mu[i], &dj);
            r.push("{mu_i, J_k}_1 = lambda_i {mu_i, J_k}_0", i, k, lhs, rhs);
        }
    }
    Ok(r)
}

/// Every entry of both bracket tables on the chart functions, relative.
pub fn verify_bracket_table(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let n = s.n();
    let chart = IjChart::at(s)?;
    let inv = chart.invariants();
    let mut r = BracketReport::new("table", cfg.tolerance, true);
    let gens: Vec<Generator> = (1..=n)
        .map(Generator::I)
        .chain((1..=n).map(Generator::J))
        .collect();
    let label = |g: Generator| match g {
        Generator::I(k) => format!("I_{k}"),
        Generator::J(k) => format!("J_{k}"),
    };
    for (a, &ga) in gens.iter().enumerate() {
        let da = chart.differential(ga);
        for (b, &gb) in gens.iter().enumerate() {
            let db = chart.differential(gb);
            let rel = format!("{{{}, {}}}", label(ga), label(gb));
            r.push(
                format!("{rel}_0"),
                a,
                b,
                bracket0_grads(&da, &db),
                closed_form0(ga, gb, inv, n),
            );
            r.push(
                format!("{rel}_1"),
                a,
                b,
                chart.bracket1_grads(&da, &db)?,
                closed_form1(ga, gb, inv),
            );
        }
    }
    Ok(r)
}

/// `{J_l, I_(k+1)}_0 = {J_l, I_k}_1 = (k + l - 1) I_(k+l-1)` for
/// `1 <= l <= n`, `1 <= k < n`.
pub fn verify_lenard(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let n = s.n();
    let mut r = BracketReport::new("lenard", cfg.tolerance, true);
    if n < 2 {
        r.note("no (k, l) pairs for n = 1");
        return Ok(r);
    }
    let chart = IjChart::at(s)?;
    let inv = chart.invariants();
    for l in 1..=n {
        let dj = chart.differential(Generator::J(l));
        for k in 1..n {
            let lhs = bracket0_grads(&dj, &chart.differential(Generator::I(k + 1)));
            let rhs = chart.bracket1_grads(&dj, &chart.differential(Generator::I(k)))?;
            let target = inv.i(k + l - 1) * (k + l - 1) as f64;
            r.push("{J_l, I_(k+1)}_0", l, k, lhs, target);
            r.push("{J_l, I_k}_1", l, k, rhs, target);
            r.push("{J_l, I_(k+1)}_0 - {J_l, I_k}_1", l, k, lhs - rhs, c(0.0));
        }
    }
    Ok(r)
}

/// `{Gamma_l, I_2}_0 = 0` for every valid `l`, plus the rank of the
/// gradients of `I_1..I_n` and the `Gamma_l`.
pub fn verify_superintegrability(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let n = s.n();
    if n < 2 {
        return Err(Error::Precondition(
            "superintegrability needs n >= 2".into(),
        ));
    }
    let mut r = BracketReport::new("superintegrability", cfg.tolerance, false);
    let di2 = gradient(&Builtin::I(2), s, cfg.step)?;
    let mut rows: Vec<Vec<Complex64>> = (1..=n)
        .map(|k| gradient(&Builtin::I(k), s, cfg.step))
        .collect::<Result<_>>()?;
    for l in (1..=n).filter(|&l| l != 2) {
        let dg = gradient(&Builtin::Gamma(l), s, cfg.step)?;
        r.push("{Gamma_l, I_2}_0", l, 2, bracket0_grads(&dg, &di2), c(0.0));
        rows.push(dg);
    }
    let expected = rows.len();
    let m = DMatrix::from_fn(rows.len(), 2 * n, |a, b| rows[a][b]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&v| v > RANK_THRESHOLD * top).count();
    if rank == expected {
        r.note(format!("gradient rank {rank} of {expected}"));
    } else {
        r.fail(format!("gradient rank {rank}, expected {expected}"));
    }
    Ok(r)
}

/// Response of `lambda`, `mu`, `mu_tilde` to a uniform translation of the
/// positions: `tau` for both momenta, zero for the eigenvalues.
pub fn verify_euler_field(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let n = s.n();
    let tau = calibrated_tau();
    let base = spectral_coords(&build_lax(s)?)?;
    let guard = if n > 1 {
        base.min_gap / 4.0
    } else {
        f64::INFINITY
    };
    let direction: Vec<f64> = (0..2 * n).map(|k| if k < n { 1.0 } else { 0.0 }).collect();
    let d = directional_derivative(
        |st| {
            let sc = spectral_coords(&build_lax(st)?)?;
            if (0..n).any(|k| (sc.lambdas[k] - base.lambdas[k]).norm() > guard) {
                return Err(Error::eval(
                    "spectral coordinates",
                    "eigenvalue branch swap inside the stencil",
                ));
            }
            Ok(sc
                .lambdas
                .iter()
                .chain(&sc.mu)
                .chain(&sc.mu_tilde)
                .copied()
                .collect())
        },
        s,
        &direction,
        cfg.step,
    )?;
    let mut r = BracketReport::new("euler", cfg.tolerance, false);
    r.note(format!("tau = {tau:+}"));
    for i in 0..n {
        r.push("Y(lambda_i)", i, i, d[i], c(0.0));
        r.push("Y(mu_i)", i, i, d[n + i], c(tau));
        r.push("Y(mu_tilde_i)", i, i, d[2 * n + i], c(tau));
    }
    Ok(r)
}

/// `{Delta(lambda), J_k}_1 = lambda {Delta(lambda), J_k}_0 + Delta(lambda) {I_1, J_k}_0`
/// at a probe `lambda` away from the spectrum.
pub fn verify_delta_generator(
    s: &PhaseState,
    lambda_probe: Complex64,
    cfg: &CheckConfig,
) -> Result<BracketReport> {
    let n = s.n();
    let pair = build_lax(s)?;
    let spec = crate::spectral::eigen(&pair.l, s.coupling());
    let scale = crate::spectral::matrix_scale(&pair.l).max(1.0);
    if let Some(k) = spec
        .lambdas
        .iter()
        .position(|&l| (l - lambda_probe).norm() <= 1e-8 * scale)
    {
        return Err(Error::Precondition(format!(
            "probe {lambda_probe} coincides with eigenvalue {}",
            k + 1
        )));
    }
    let chart = IjChart::at(s)?;
    let delta_obs = Builtin::CharPoly(lambda_probe);
    let d_delta = gradient(&delta_obs, s, cfg.step)?;
    let delta = delta_obs.eval_unchecked(s)?;
    let di1 = chart.differential(Generator::I(1));
    let mut r = BracketReport::new("delta-generator", cfg.tolerance, true);
    r.note(format!("lambda = {lambda_probe}"));
    for k in 1..=n {
        let dj = chart.differential(Generator::J(k));
        let lhs = chart.bracket1_grads(&d_delta, &dj)?;
        let rhs = lambda_probe * bracket0_grads(&d_delta, &dj) + delta * bracket0_grads(&di1, &dj);
        r.push("{Delta, J_k}_1", k, k, lhs, rhs);
    }
    Ok(r)
}

/// Checks `{I_k, I_l}_0 = 0` with the closed-form gradients, independently
/// of the chart.
pub fn verify_involution(s: &PhaseState, cfg: &CheckConfig) -> Result<BracketReport> {
    let n = s.n();
    let (inv_grads, _) = invariant_gradients(s, n)?;
    let mut r = BracketReport::new("involution", cfg.tolerance, false);
    for a in 0..n {
        for b in 0..n {
            r.push(
                "{I_k, I_l}_0",
                a + 1,
                b + 1,
                bracket0_grads(&inv_grads[a], &inv_grads[b]),
                c(0.0),
            );
        }
    }
    Ok(r)
}
