//! Inverse Cayley transform of `R(θ)` for `N = 3` and the `R̂tt` exchange
//! relations between monodromy blocks.

pub mod cayley;
pub mod rtt;

pub use cayley::{
    cayley_exclusion, closed_form_x, emit_v_csv, excluded_values, inverse_cayley, CayleyResult,
    Exclusion,
};
pub use rtt::{rtt_verify, wholesale_residual, RelationResidual, RttReport};
