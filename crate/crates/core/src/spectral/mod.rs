//! Characteristic data, eigen-decomposition and spectral coordinates of `L`.

mod charpoly;
mod coords;
mod eigen;

pub use charpoly::{delta_derivatives, faddeev_leverrier, CharData};
pub use coords::{
    conjecture_residual, conjecture_residual_scaled, default_probes, denominator_residual,
    eigenvector_coords, eigenvector_coords_from, gen_e, gen_e_denominator, gen_g, spectral_coords,
    spectral_coords_from, SpectralCoords, DENOMINATOR_TOLERANCE,
};
pub use eigen::{eigen, gap_threshold, matrix_scale, spectral_order, Spectrum, GAP_FACTOR};
