//! Circuit parameters, validity diagnostics and Hamiltonian construction.

mod diagnostics;
mod hamiltonian;
mod params;

pub use diagnostics::{
    check_resonance, check_resonance_with, check_rwa, check_rwa_with, check_two_level, check_two_level_with,
    solve_bias_voltage, ResonanceReport, RwaReport, TwoLevelReport, DEFAULT_RESONANCE_TOLERANCE, DEFAULT_RWA_THRESHOLD,
    DEFAULT_TWO_LEVEL_THRESHOLD,
};
pub use hamiltonian::{build_h_eff, build_h_i, g_eff, InteractionHamiltonian};
pub use params::{circuit_to_model, coupling_from_impedance, CircuitParams, ModelParams, UserModelParams};
