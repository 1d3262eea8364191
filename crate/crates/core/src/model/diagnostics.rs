//! Resonance, rotating-wave and two-level validity checks.

use serde::{Deserialize, Serialize};

use super::params::{CircuitParams, ModelParams};
use crate::error::ModelError;
use crate::operators::frank_condon_unchecked;
use crate::units;

pub const DEFAULT_RESONANCE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_RWA_THRESHOLD: f64 = 0.05;
pub const DEFAULT_TWO_LEVEL_THRESHOLD: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    /// `ω_J − (δ + ω1 + ω2)`, rad/ns.
    pub detuning: f64,
    pub tolerance: f64,
    pub on_resonance: bool,
}

pub fn check_resonance(m: &ModelParams) -> ResonanceReport {
    check_resonance_with(m, DEFAULT_RESONANCE_TOLERANCE)
}

pub fn check_resonance_with(m: &ModelParams, tolerance: f64) -> ResonanceReport {
    let detuning = m.omega_j - m.resonance_target();
    ResonanceReport { detuning, tolerance, on_resonance: detuning.abs() < tolerance }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaReport {
    /// `(E_J/4)|β_0^1(λ1) β_0^1(λ2)| / min(δ, ω1, ω2, |ω1−ω2|)`, the channel
    /// that drives the pumping cycle.
    pub ratio: f64,
    /// Largest ratio over every channel `n, m <= cutoff`.
    pub worst_ratio: f64,
    pub worst_channel: (usize, usize),
    /// `min(δ, ω1, ω2, |ω1−ω2|)`, rad/ns.
    pub smallest_frequency: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn check_rwa(m: &ModelParams) -> Result<RwaReport, ModelError> {
    check_rwa_with(m, DEFAULT_RWA_THRESHOLD)
}

pub fn check_rwa_with(m: &ModelParams, threshold: f64) -> Result<RwaReport, ModelError> {
    let split = (m.omega_1 - m.omega_2).abs();
    if split <= 1e-12 * m.omega_1.abs().max(m.omega_2.abs()) {
        return Err(ModelError::DegenerateCavities);
    }
    let smallest = [m.delta, m.omega_1, m.omega_2, split].into_iter().fold(f64::INFINITY, f64::min);
    let coupling = |n: usize, k: usize| {
        0.25 * m.e_j * (frank_condon_unchecked(n, 1, m.lambda_1) * frank_condon_unchecked(k, 1, m.lambda_2)).norm()
    };
    let ratio = coupling(0, 0) / smallest;
    let mut worst = (ratio, (0, 0));
    for n in 0..=m.cutoff {
        for k in 0..=m.cutoff {
            let r = coupling(n, k) / smallest;
            if r > worst.0 {
                worst = (r, (n, k));
            }
        }
    }
    Ok(RwaReport {
        ratio,
        worst_ratio: worst.0,
        worst_channel: worst.1,
        smallest_frequency: smallest,
        threshold,
        passed: ratio < threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelReport {
    /// `6 E_c / E_Jq`: third-level energy over the qubit splitting.
    pub ratio: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn check_two_level(c: &CircuitParams) -> TwoLevelReport {
    check_two_level_with(c, DEFAULT_TWO_LEVEL_THRESHOLD)
}

pub fn check_two_level_with(c: &CircuitParams, threshold: f64) -> TwoLevelReport {
    let ratio =
        if c.qubit_josephson_ghz == 0.0 { f64::INFINITY } else { 6.0 * c.charging_energy_ghz / c.qubit_josephson_ghz };
    TwoLevelReport { ratio, threshold, passed: ratio > threshold }
}

/// Bias voltage (µV) at which `2eV/ħ = δ + ω1 + ω2`.
pub fn solve_bias_voltage(m: &ModelParams) -> f64 {
    units::bias_for_josephson_frequency(m.resonance_target())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{angular_to_ghz, ghz_to_angular};
    use approx::assert_relative_eq;

    fn fig2() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn resonance_examples() {
        let m = ModelParams { omega_j: ghz_to_angular(21.0), ..fig2() };
        let r = check_resonance(&m);
        assert!(r.on_resonance, "{r:?}");
        let m = ModelParams { omega_j: ghz_to_angular(20.0), ..fig2() };
        let r = check_resonance(&m);
        assert!(!r.on_resonance);
        assert_relative_eq!(angular_to_ghz(r.detuning), -1.0, max_relative = 1e-12);
        // solve_bias_voltage closes the loop
        let m = ModelParams { omega_j: 0.0, ..fig2() }.tuned_to_resonance();
        assert!(check_resonance(&m).on_resonance);
        assert!(check_resonance(&m).detuning.abs() < 1e-12);
    }

    #[test]
    fn rwa_examples() {
        let r = check_rwa(&fig2()).unwrap();
        // 0.125 GHz * 0.13634 / 2 GHz
        assert_relative_eq!(r.ratio, 0.125 * (0.4 * (-0.08f64).exp()).powi(2) / 2.0, max_relative = 1e-12);
        assert!((r.ratio - 0.0085).abs() < 5e-5);
        assert!(r.passed);
        assert!(r.worst_ratio >= r.ratio);
        assert_relative_eq!(angular_to_ghz(r.smallest_frequency), 2.0, max_relative = 1e-12);

        let r = check_rwa(&ModelParams { e_j: 0.0, ..fig2() }).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.passed);

        let r = check_rwa(&ModelParams { e_j: ghz_to_angular(40.0), ..fig2() }).unwrap();
        assert!(r.ratio > 0.05 && !r.passed);

        let degenerate = ModelParams { omega_2: fig2().omega_1, ..fig2() };
        assert_eq!(check_rwa(&degenerate).unwrap_err(), ModelError::DegenerateCavities);
    }

    fn qubit(e_c: f64, e_jq: f64) -> CircuitParams {
        CircuitParams {
            inductance_nh: [5.0, 5.0],
            capacitance_ff: [60.0, 80.0],
            junction_energy_ghz: 0.25,
            flux_ratio: 0.0,
            charging_energy_ghz: e_c,
            qubit_josephson_ghz: e_jq,
            bias_voltage_uv: None,
        }
    }

    #[test]
    fn two_level_examples() {
        let r = check_two_level(&qubit(20.0, 5.0));
        assert_relative_eq!(r.ratio, 24.0);
        assert!(r.passed);
        let r = check_two_level(&qubit(1.0, 6.0));
        assert_relative_eq!(r.ratio, 1.0);
        assert!(!r.passed);
        let r = check_two_level(&qubit(1.0, 0.0));
        assert!(r.ratio.is_infinite() && r.passed);
    }

    #[test]
    fn bias_voltage_examples() {
        assert!((solve_bias_voltage(&fig2()) - 43.43).abs() < 0.01, "{}", solve_bias_voltage(&fig2()));
        let zero = ModelParams { omega_1: 0.0, omega_2: 0.0, delta: 0.0, ..fig2() };
        assert_eq!(solve_bias_voltage(&zero), 0.0);
        let doubled = ModelParams {
            omega_1: 2.0 * fig2().omega_1,
            omega_2: 2.0 * fig2().omega_2,
            delta: 2.0 * fig2().delta,
            ..fig2()
        };
        assert_relative_eq!(solve_bias_voltage(&doubled), 2.0 * solve_bias_voltage(&fig2()), max_relative = 1e-15);
    }
}
