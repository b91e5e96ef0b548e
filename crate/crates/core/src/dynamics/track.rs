use crate::error::{Error, Result};
use crate::lax::build_lax;
use crate::spectral::{spectral_coords, SpectralCoords};

use super::Trajectory;

/// Fills `coord_tracks`, labelling eigenvalue branches continuously in time.
///
/// Each branch of the previous sample is matched greedily to the nearest
/// unused eigenvalue of the current one. A match is ambiguous, and rejected,
/// when the runner-up is closer than twice the drift of the chosen match
/// beyond it.
pub fn track_coordinates(mut traj: Trajectory) -> Result<Trajectory> {
    let mut tracks: Vec<SpectralCoords> = Vec::with_capacity(traj.len());
    for (k, s) in traj.states.iter().enumerate() {
        let sc = spectral_coords(&build_lax(s)?)?;
        let Some(prev) = tracks.last() else {
            tracks.push(sc);
            continue;
        };
        let n = sc.n();
        let mut used = vec![false; n];
        let mut perm = vec![0; n];
        for i in 0..n {
            let mut best = (usize::MAX, f64::INFINITY);
            let mut second = f64::INFINITY;
            for j in (0..n).filter(|&j| !used[j]) {
                let d = (sc.lambdas[j] - prev.lambdas[i]).norm();
                if d < best.1 {
                    second = best.1;
                    best = (j, d);
                } else if d < second {
                    second = d;
                }
            }
            if second - best.1 < 2.0 * best.1 {
                return Err(Error::BranchAmbiguity { sample: k });
            }
            used[best.0] = true;
            perm[i] = best.0;
        }
        tracks.push(sc.permuted(&perm));
    }
    traj.coord_tracks = Some(tracks);
    Ok(traj)
}
