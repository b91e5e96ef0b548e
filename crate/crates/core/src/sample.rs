//! Seeded random states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::{Coupling, PhaseState};

/// Minimum spacing between sampled positions.
pub const MIN_SAMPLE_GAP: f64 = 0.2;

/// The one generator every random sweep draws from.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted positions uniform on `[-n, n]` with spacing at least
/// [`MIN_SAMPLE_GAP`], momenta uniform on `[-1, 1]`.
///
/// Positions are drawn on the interval shrunk by the total mandatory gap,
/// sorted, then spread out by `k * gap`, which is exactly the uniform law
/// conditioned on the spacing constraint.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    coupling: Coupling,
) -> Result<PhaseState> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "particle count must be at least 1".into(),
        ));
    }
    let half = n as f64;
    let slack = 2.0 * half - (n - 1) as f64 * MIN_SAMPLE_GAP;
    if slack <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "cannot fit {n} particles in [-{n}, {n}]"
        )));
    }
    let mut x: Vec<f64> = (0..n)
        .map(|_| -half + rng.random::<f64>() * slack)
        .collect();
    x.sort_by(f64::total_cmp);
    for (k, v) in x.iter_mut().enumerate() {
        *v += k as f64 * MIN_SAMPLE_GAP;
    }
    let p = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    PhaseState::new(x, p, coupling)
}
