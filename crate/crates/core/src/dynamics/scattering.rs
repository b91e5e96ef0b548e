use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lax::build_lax;
use crate::poisson::BracketReport;
use crate::spectral::spectral_coords;
use crate::state::PhaseState;

use super::{exact_flow, track_coordinates, Trajectory};

/// Samples per half-line used by the asymptotic fits.
const FIT_SAMPLES: usize = 41;
/// Tolerance for the stabilisation of `mu_tilde -+ lambda t` and for the
/// intercept match.
const INTERCEPT_TOLERANCE: f64 = 1e-2;
/// Below this the distance to the asymptote is treated as zero.
const EXACT_DISTANCE: f64 = 1e-9;

/// Slopes and intercepts of the free motion for `t -> +inf` and `t -> -inf`.
///
/// Entry `k` refers to the `k`-th particle from the left at that end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringData {
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    pub x_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    /// Largest absolute residual of the fits.
    pub fit_residuals: f64,
}

/// Least-squares line through `(t, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual.
    pub residual: f64,
}

pub fn affine_fit(times: &[f64], values: &[f64]) -> Result<AffineFit> {
    let coef = least_squares(times, values, &[|t| t, |_| 1.0])?;
    let residual = max_residual(times, values, &coef, &[|t| t, |_| 1.0]);
    Ok(AffineFit {
        slope: coef[0],
        intercept: coef[1],
        residual,
    })
}

type Basis = fn(f64) -> f64;

fn least_squares(times: &[f64], values: &[f64], basis: &[Basis]) -> Result<Vec<f64>> {
    if times.len() != values.len() || times.len() < basis.len() {
        return Err(Error::InvalidInput("not enough samples for the fit".into()));
    }
    let a = DMatrix::from_fn(times.len(), basis.len(), |r, c| basis[c](times[r]));
    let b = DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    let coef = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))?;
    Ok(coef.iter().copied().collect())
}

fn max_residual(times: &[f64], values: &[f64], coef: &[f64], basis: &[Basis]) -> f64 {
    times
        .iter()
        .zip(values)
        .map(|(&t, &v)| (v - basis.iter().zip(coef).map(|(f, c)| c * f(t)).sum::<f64>()).abs())
        .fold(0.0, f64::max)
}

/// Fits `x(t) = p t + x0 + c/t + d/t^2` per particle on `[t_max/2, t_max]`
/// and on `[-t_max, -t_max/2]`, sampling the projection flow.
///
/// Time is rescaled by `t_max` inside the fit; the `1/t` terms absorb the
/// leading correction to free motion, which otherwise biases the slope by
/// `O(1/t_max^2)`.
pub fn scattering(s: &PhaseState, t_max: f64) -> Result<ScatteringData> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidInput("t_max must be positive".into()));
    }
    let sc = spectral_coords(&build_lax(s)?)?;
    if s.n() > 1 && sc.degenerate {
        return Err(Error::DegenerateSpectrum {
            min_gap: sc.min_gap,
            threshold: 0.0,
        });
    }
    let (p_plus, x_plus, r_plus) = fit_end(s, t_max, 1.0)?;
    let (p_minus, x_minus, r_minus) = fit_end(s, t_max, -1.0)?;
    Ok(ScatteringData {
        p_plus,
        p_minus,
        x_plus,
        x_minus,
        fit_residuals: r_plus.max(r_minus),
    })
}

fn fit_end(s: &PhaseState, t_max: f64, sign: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = s.n();
    let taus: Vec<f64> = (0..FIT_SAMPLES)
        .map(|k| sign * (0.5 + 0.5 * k as f64 / (FIT_SAMPLES - 1) as f64))
        .collect();
    let states: Vec<PhaseState> = taus
        .iter()
        .map(|&tau| exact_flow(s, tau * t_max))
        .collect::<Result<_>>()?;
    // Order by position at the far end; particles never cross, so this is
    // the same order at every sample.
    let last = states.last().expect("samples");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| last.x()[a].total_cmp(&last.x()[b]));
    let basis: [Basis; 4] = [|t| t, |_| 1.0, |t| 1.0 / t, |t| 1.0 / (t * t)];
    let mut slopes = Vec::with_capacity(n);
    let mut intercepts = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    for &i in &order {
        let xs: Vec<f64> = states.iter().map(|st| st.x()[i]).collect();
        let coef = least_squares(&taus, &xs, &basis)?;
        worst = worst.max(max_residual(&taus, &xs, &coef, &basis));
        slopes.push(coef[0] / t_max);
        intercepts.push(coef[1]);
    }
    Ok((slopes, intercepts, worst))
}

/// Outcome of [`asymptotic_momenta_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticCheck {
    /// Intercept matches, one entry per branch and end.
    pub report: BracketReport,
    /// `-1` when `mu_tilde - lambda t` converges as `t -> +inf`, `+1` for
    /// `mu_tilde + lambda t`.
    pub combination_plus: f64,
    pub combination_minus: f64,
    /// Per branch, `+1` if the limit matched `+x_k`, `-1` for `-x_k`.
    pub sign_pattern_plus: Vec<f64>,
    pub sign_pattern_minus: Vec<f64>,
    /// Observed exponent `a` in `|Re mu_tilde_k(t) - x_k(t)| ~ t^-a`,
    /// `None` where the distance is zero to working precision.
    pub rate_exponents: Vec<Option<f64>>,
    /// `max |sorted(p_plus) - sorted(lambda)|`, also over `p_minus`.
    pub momentum_deviation: f64,
    pub pass: bool,
}

/// Follows `mu_tilde_k(t) -+ lambda_k t` along the projection flow, decides
/// which of the two settles down at each end, matches its real part against
/// `+-x_k` of the branch with momentum `lambda_k`, and measures how fast
/// `Re mu_tilde_k` approaches that particle's position.
pub fn asymptotic_momenta_check(s: &PhaseState, t_max: f64) -> Result<AsymptoticCheck> {
    let n = s.n();
    let scat = scattering(s, t_max)?;
    let base = spectral_coords(&build_lax(s)?)?;
    let lambdas: Vec<f64> = base.lambdas.iter().map(|l| l.re).collect();

    let mut sorted_l = lambdas.clone();
    sorted_l.sort_by(f64::total_cmp);
    let dev = |p: &[f64]| {
        let mut q = p.to_vec();
        q.sort_by(f64::total_cmp);
        q.iter()
            .zip(&sorted_l)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let momentum_deviation = dev(&scat.p_plus).max(dev(&scat.p_minus));

    let mut report = BracketReport::new("asymptotic momenta", INTERCEPT_TOLERANCE, false);
    let mut combos = [0.0; 2];
    let mut patterns = [Vec::new(), Vec::new()];
    let mut rates = Vec::new();
    let mut rates_ok = true;
    for (e, sign) in [1.0f64, -1.0].into_iter().enumerate() {
        let t_far = sign * t_max;
        let traj = track_coordinates(Trajectory::from_exact_flow(s, &[0.0, 0.5 * t_far, t_far])?)?;
        let tracks = traj.coord_tracks.as_ref().expect("tracked");
        let (half, far) = (&tracks[1], &tracks[2]);
        let stable = |c: f64| {
            (0..n).all(|k| {
                let r_half = half.mu_tilde[k] + half.lambdas[k] * (c * 0.5 * t_far);
                let r_far = far.mu_tilde[k] + far.lambdas[k] * (c * t_far);
                (r_far - r_half).norm() < 1e-3
            })
        };
        let combo = if stable(-1.0) {
            -1.0
        } else if stable(1.0) {
            1.0
        } else {
            return Err(Error::NoConvergence(format!(
                "neither mu_tilde - lambda t nor mu_tilde + lambda t settles by t = {t_far}"
            )));
        };
        combos[e] = combo;
        let (p_end, x_end) = if e == 0 {
            (&scat.p_plus, &scat.x_plus)
        } else {
            (&scat.p_minus, &scat.x_minus)
        };
        // Branch positions at the far and half-way times, left to right.
        let sorted_x = |st: &PhaseState| {
            let mut v = st.x().to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        let x_far = sorted_x(&traj.states[2]);
        let x_half = sorted_x(&traj.states[1]);
        for k in 0..n {
            let branch = (0..n)
                .min_by(|&a, &b| {
                    (p_end[a] - lambdas[k])
                        .abs()
                        .total_cmp(&(p_end[b] - lambdas[k]).abs())
                })
                .expect("n >= 1");
            let limit = (far.mu_tilde[k] + far.lambdas[k] * (combo * t_far)).re;
            let x0 = x_end[branch];
            let sgn = if (limit - x0).abs() <= (limit + x0).abs() {
                1.0
            } else {
                -1.0
            };
            patterns[e].push(sgn);
            let label = if e == 0 {
                "Re r_k (t -> +inf) vs sign * x_k^+"
            } else {
                "Re r_k (t -> -inf) vs sign * x_k^-"
            };
            report.push(label, k, branch, limit.into(), (sgn * x0).into());

            let d_far = (far.mu_tilde[k].re - x_far[branch]).abs();
            let d_half = (half.mu_tilde[k].re - x_half[branch]).abs();
            if d_far < EXACT_DISTANCE * t_max.max(1.0) {
                rates.push(None);
            } else {
                let a = (d_half / d_far).log2();
                if !((a - 1.0).abs() < 0.1) {
                    rates_ok = false;
                }
                rates.push(Some(a));
            }
        }
    }
    if !rates_ok {
        report.fail("approach to the asymptote is not O(1/t)");
    }
    report.note(format!(
        "max |sorted p - sorted lambda| = {momentum_deviation:.3e}"
    ));
    let pass = report.pass;
    Ok(AsymptoticCheck {
        report,
        combination_plus: combos[0],
        combination_minus: combos[1],
        sign_pattern_plus: patterns[0].clone(),
        sign_pattern_minus: patterns[1].clone(),
        rate_exponents: rates,
        momentum_deviation,
        pass,
    })
}
