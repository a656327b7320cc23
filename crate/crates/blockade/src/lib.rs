//! Simulator for a pair of laser-driven two-level atoms whose doubly excited
//! level is shifted by the interatomic dipole-dipole interaction.
//!
//! The library covers the master-equation dynamics of the pair (adaptive
//! Runge-Kutta on the Lindblad generator), the closed-form and numeric steady
//! states, the double-excitation blockade ratio `P_ee / P_e^2`, Wootters
//! concurrence of the steady and transient states, and the normalized
//! photon-photon correlation `g2(tau)` seen by two detectors with geometric
//! phases `phi1`, `phi2`.
//!
//! All rates are expressed in units of the total single-atom half-width
//! `gamma = gamma_s + gamma_d`, all times in units of `1/gamma`.

pub mod cli;
pub mod correlations;
pub mod entanglement;
mod error;
pub mod evolution;
mod linalg;
pub mod liouville;
pub mod model;
pub mod observables;
pub mod steady;
#[cfg(test)]
mod testutil;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use evolution::{evolve, evolve_matrix, evolve_matrix_expm, IntegratorConfig, Trajectory};
pub use liouville::{
    apply_generator, build_superoperator, hamiltonian, stationarity_defect, Superoperator,
};
pub use model::{
    basis_transform, partial_trace, pure_state, Atom, Basis, DensityMatrix, DetectorGeometry,
    SystemParams, DIM,
};
pub use observables::{
    blockade_ratio_analytic, dicke_populations, double_excitation_probability,
    excitation_probability,
};
pub use steady::{alpha, steady_state_analytic, steady_state_numeric};

pub use correlations::{detector_operator, g2, g2_zero_analytic, monitor_ratio};
pub use entanglement::{
    concurrence, concurrence_hermitian, entanglement_window, steady_concurrence_analytic,
};
