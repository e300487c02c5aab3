//! Intracavity dynamics in truncated Fock space.
//!
//! Three routes to the state grown from vacuum:
//!
//! - [`evolve_closed_form`]: the SU(1,1) disentangled product acting on
//!   `|0,0⟩`, giving amplitudes `Γ̃^{1/2} Γⁿ` on `|n,n⟩`.
//! - [`evolve_numeric`]: `exp(−iHτ)|0,0⟩` on the full truncated two-mode
//!   space, used as an oracle for the closed form.
//! - [`evolve_three_mode`]: the model that still carries the collective
//!   atomic mode `b`, used to check the elimination of `b`.
//!
//! Constant energy offsets are dropped everywhere; they only contribute a
//! global phase.

mod evolve;
mod state;
mod su11;

pub use evolve::{
    evolve_closed_form, evolve_numeric, evolve_three_mode, three_mode_hamiltonian,
    two_mode_hamiltonian,
};
pub use state::{
    entanglement_entropy, fidelity, pair_distribution, reduce_to_two_modes, ReducedState,
    ThreeModeState, TwoModeState, DEFAULT_TAIL_THRESHOLD,
};
pub use su11::{su11_coefficients, Branch, PairHamiltonian, Su11Coefficients, SERIES_SWITCH};
