//! Time evolution under the Calogero-Moser Hamiltonian.
//!
//! [`exact_flow`] solves the motion in closed form through the spectrum of
//! `X + t L`; [`integrate`] runs an adaptive Runge-Kutta integrator on
//! Hamilton's equations and serves as an independent cross-check.
//! [`track_coordinates`] follows the spectral coordinates along a
//! trajectory, and [`scattering`] / [`asymptotic_momenta_check`] look at the
//! free motion the particles settle into for large `|t|`.

mod flow;
mod integrate;
mod scattering;
mod track;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralCoords;
use crate::state::PhaseState;

pub use flow::exact_flow;
pub use integrate::{integrate, integrate_with, IntegratorOptions, DEFAULT_COLLISION_THRESHOLD};
pub use scattering::{
    affine_fit, asymptotic_momenta_check, scattering, AffineFit, AsymptoticCheck, ScatteringData,
};
pub use track::track_coordinates;

/// Sampled states along a motion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    /// Spectral coordinates with a continuous branch labelling, once tracked.
    pub coord_tracks: Option<Vec<SpectralCoords>>,
    pub energy_track: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn empty() -> Self {
        Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            coord_tracks: None,
            energy_track: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, s: PhaseState, energy: f64) {
        self.times.push(t);
        self.states.push(s);
        self.energy_track.push(energy);
    }

    /// Samples the projection flow at the given times.
    pub fn from_exact_flow(s: &PhaseState, times: &[f64]) -> Result<Self> {
        let mut traj = Trajectory::empty();
        for &t in times {
            let st = exact_flow(s, t)?;
            let e = crate::lax::hamiltonian(&st)?;
            traj.push(t, st, e);
        }
        Ok(traj)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |H(t) - H(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let Some(&e0) = self.energy_track.first() else {
            return 0.0;
        };
        self.energy_track
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_(t, i) |lambda_i(t) - lambda_i(0)|` over the tracked coordinates.
    pub fn isospectral_drift(&self) -> Option<f64> {
        let tracks = self.coord_tracks.as_ref()?;
        let first = tracks.first()?;
        Some(
            tracks
                .iter()
                .flat_map(|c| {
                    c.lambdas
                        .iter()
                        .zip(&first.lambdas)
                        .map(|(a, b)| (a - b).norm())
                })
                .fold(0.0, f64::max),
        )
    }

    /// Writes one CSV row per sample. Requires tracked coordinates.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let tracks = self
            .coord_tracks
            .as_ref()
            .ok_or_else(|| Error::Precondition("trajectory has no tracked coordinates".into()))?;
        let n = self.states.first().map_or(0, PhaseState::n);
        let io = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        for prefix in [
            "x",
            "p",
            "lambda",
            "re_mu",
            "im_mu",
            "re_mutilde",
            "im_mutilde",
        ] {
            header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
        }
        header.push("energy".into());
        out.write_record(&header).map_err(io)?;
        for ((t, s), (c, e)) in self
            .times
            .iter()
            .zip(&self.states)
            .zip(tracks.iter().zip(&self.energy_track))
        {
            let mut row = vec![*t];
            row.extend_from_slice(s.x());
            row.extend_from_slice(s.p());
            row.extend(c.lambdas.iter().map(|v| v.re));
            row.extend(c.mu.iter().map(|v| v.re));
            row.extend(c.mu.iter().map(|v| v.im));
            row.extend(c.mu_tilde.iter().map(|v| v.re));
            row.extend(c.mu_tilde.iter().map(|v| v.im));
            row.push(*e);
            out.write_record(row.iter().map(|v| format!("{v:e}")))
                .map_err(io)?;
        }
        out.flush()
            .map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Coupling;

    #[test]
    fn csv_layout() {
        let s = PhaseState::new(vec![1.0, -1.0], vec![0.0, 0.0], Coupling::Imaginary).unwrap();
        let traj = Trajectory::from_exact_flow(&s, &[0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        assert!(traj.write_csv(&mut buf).is_err());
        let traj = track_coordinates(traj).unwrap();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "t,x_1,x_2,p_1,p_2,lambda_1,lambda_2,re_mu_1,re_mu_2,im_mu_1,im_mu_2,\
             re_mutilde_1,re_mutilde_2,im_mutilde_1,im_mutilde_2,energy"
        );
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 16));
        assert!(traj.energy_drift() < 1e-12);
    }
}
