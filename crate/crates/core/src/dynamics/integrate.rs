//! Dormand-Prince 5(4) with per-step error control.

use crate::error::{Error, Result};
use crate::lax::hamiltonian;
use crate::state::{Coupling, PhaseState};

use super::Trajectory;

/// Default collision threshold `eps_dyn`.
pub const DEFAULT_COLLISION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    /// Local error tolerance, mixed absolute/relative.
    pub tol: f64,
    /// Minimum admissible separation between particles.
    pub collision_threshold: f64,
    /// Times (between 0 and `t_end`) at which a state must be recorded.
    pub output_times: Vec<f64>,
    /// Record every accepted step, not only the output times.
    pub record_steps: bool,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            tol: 1e-10,
            collision_threshold: DEFAULT_COLLISION_THRESHOLD,
            output_times: Vec::new(),
            record_steps: true,
            max_steps: 1_000_000,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

// The field is autonomous, so the stage times are not needed.

/// Hamilton's equations `x' = p`, `p_i' = 2g sum_(j != i) (x_i - x_j)^-3`.
fn vector_field(g: f64, u: &[f64], out: &mut [f64]) {
    let n = u.len() / 2;
    out[..n].copy_from_slice(&u[n..]);
    for i in 0..n {
        let mut f = 0.0;
        for j in 0..n {
            if j != i {
                let d = u[i] - u[j];
                f += 1.0 / (d * d * d);
            }
        }
        out[n + i] = 2.0 * g * f;
    }
}

fn min_gap(u: &[f64]) -> f64 {
    let n = u.len() / 2;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min((u[i] - u[j]).abs());
        }
    }
    best
}

/// Integrates from `s` to `t_end` with default options at tolerance `tol`.
pub fn integrate(s: &PhaseState, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_with(
        s,
        t_end,
        &IntegratorOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Integrates Hamilton's equations from `s` over `[0, t_end]` (or
/// `[t_end, 0]` for negative `t_end`).
///
/// Steps are shortened to land exactly on every requested output time and on
/// `t_end`. The trajectory holds the initial state, the output times and,
/// if `record_steps` is set, every accepted step.
pub fn integrate_with(s: &PhaseState, t_end: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    if s.coupling() == Coupling::Real {
        return Err(Error::CouplingUnsupported(
            "numerical dynamics is restricted to the repulsive (imaginary) coupling".into(),
        ));
    }
    if !t_end.is_finite() || !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(
            "t_end must be finite and tol positive".into(),
        ));
    }
    let dir = if t_end >= 0.0 { 1.0 } else { -1.0 };
    let mut stops: Vec<f64> = opts
        .output_times
        .iter()
        .copied()
        .filter(|t| t * dir > 0.0 && t * dir < t_end * dir)
        .collect();
    stops.push(t_end);
    stops.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    stops.dedup();

    let g = s.coupling().g();
    let dim = 2 * s.n();
    let mut traj = Trajectory::empty();
    traj.push(0.0, s.clone(), hamiltonian(s)?);
    if t_end == 0.0 {
        return Ok(traj);
    }

    let mut u = s.coords();
    let mut t = 0.0f64;
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    vector_field(g, &u, &mut k[0]);
    let mut h = dir * initial_step(&u, &k[0], opts.tol, t_end.abs());
    let mut stop_idx = 0;
    let mut steps = 0usize;

    while stop_idx < stops.len() {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        let target = stops[stop_idx];
        let landing = (t + h - target) * dir >= 0.0;
        let h_try = if landing { target - t } else { h };
        let h_min = 1e-14 * t.abs().max(1.0);
        if h_try.abs() < h_min && !landing {
            return Err(Error::StepUnderflow { t, h: h_try });
        }

        for st in 1..7 {
            for d in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(st) {
                    acc += A[st][j] * kj[d];
                }
                stage[d] = u[d] + h_try * acc;
            }
            vector_field(g, &stage, &mut k[st]);
        }
        // stage now holds the fifth-order solution (FSAL row), k[6] its slope.
        let mut err = 0.0f64;
        for d in 0..dim {
            let mut e = 0.0;
            for j in 0..7 {
                e += (B5[j] - B4[j]) * k[j][d];
            }
            next[d] = stage[d];
            let scale = opts.tol * (1.0 + u[d].abs().max(next[d].abs()));
            err = err.max((h_try * e).abs() / scale);
        }
        if !err.is_finite() {
            err = f64::INFINITY;
        }
        steps += 1;

        if err <= 1.0 {
            t = if landing { target } else { t + h_try };
            std::mem::swap(&mut u, &mut next);
            k.swap(0, 6);
            let sep = min_gap(&u);
            if sep < opts.collision_threshold {
                return Err(Error::CollisionDetected { t, separation: sep });
            }
            let record = landing || opts.record_steps;
            if record {
                let st = PhaseState::from_coords(&u, s.coupling())
                    .map_err(|_| Error::CollisionDetected { t, separation: sep })?;
                let e = hamiltonian(&st)?;
                traj.push(t, st, e);
            }
            if landing {
                stop_idx += 1;
            }
            // A step shortened to land on an output time says little about
            // the natural step size, so only full steps adapt it.
            if !landing {
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = h_try * factor;
            }
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h = h_try * factor;
            if h.abs() < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(traj)
}

fn initial_step(u: &[f64], f0: &[f64], tol: f64, span: f64) -> f64 {
    let d0 = u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let d1 = f0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let h = if d1 > 0.0 { 0.01 * d0 / d1 } else { 1e-3 };
    (h * tol.powf(0.2) * 10.0).min(span).max(1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::exact_flow;

    #[test]
    fn free_particle() {
        let s = PhaseState::new(vec![0.0], vec![1.0], Coupling::Imaginary).unwrap();
        let tr = integrate(&s, 3.0, 1e-10).unwrap();
        let last = tr.states.last().unwrap();
        assert_eq!(*tr.times.last().unwrap(), 3.0);
        assert!((last.x()[0] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn matches_projection_flow() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let tr = integrate(&s, 2.0, 1e-10).unwrap();
        let exact = exact_flow(&s, 2.0).unwrap();
        let last = tr.states.last().unwrap();
        for (a, b) in last.x().iter().zip(exact.x()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(tr.energy_track.iter().all(|e| (e - 0.25).abs() < 1e-8));
    }

    #[test]
    fn output_times_and_backwards() {
        let s = PhaseState::new(
            vec![0.5, -0.7, 1.9],
            vec![0.2, 0.4, -0.3],
            Coupling::Imaginary,
        )
        .unwrap();
        let opts = IntegratorOptions {
            output_times: vec![-0.5, -1.0],
            record_steps: false,
            ..Default::default()
        };
        let tr = integrate_with(&s, -1.5, &opts).unwrap();
        assert_eq!(tr.times, vec![0.0, -0.5, -1.0, -1.5]);
        let exact = exact_flow(&s, -1.5).unwrap();
        for (a, b) in tr.states[3].x().iter().zip(exact.x()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn collision_threshold() {
        // Two particles rushing at each other turn around where
        // g / r^2 = H, i.e. r ~ 0.2; a larger threshold trips the detector.
        let s = PhaseState::new(vec![-1.0, 1.0], vec![5.0, -5.0], Coupling::Imaginary).unwrap();
        let opts = IntegratorOptions {
            collision_threshold: 0.3,
            ..Default::default()
        };
        assert!(matches!(
            integrate_with(&s, 1.0, &opts),
            Err(Error::CollisionDetected { .. })
        ));
        assert!(integrate(&s, 1.0, 1e-10).is_ok());
    }
}
