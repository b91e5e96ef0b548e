//! The brackets `{.,.}_0` and `{.,.}_1`, the invariants `I_k`, `J_k`,
//! `Gamma_l`, and the suites that check the spectral coordinates against them.

mod bracket;
mod gradient;
mod invariants;
mod observable;
mod report;
mod verify;

pub use bracket::{
    bracket0, bracket0_grads, bracket1, closed_form0, closed_form1, Generator, IjChart,
    MAX_CHART_CONDITION,
};
pub use gradient::{directional_derivative, gradient, jacobian, FdStep};
pub use invariants::{
    gamma, invariant_gradients, invariants_ij, invariants_ij_upto, InvariantBasis,
};
pub use observable::{Builtin, FnObservable, Observable};
pub use report::{BracketEntry, BracketReport};
pub use verify::{
    calibrated_sigma, calibrated_tau, spectral_gradients, verify_bracket1_relations,
    verify_bracket_table, verify_canonicity, verify_commutation, verify_delta_generator,
    verify_euler_field, verify_involution, verify_lenard, verify_superintegrability, CheckConfig,
    SpectralGradients,
};
