use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::operators::SpaceLayout;
use crate::units::{self, angular_to_ghz, ghz_to_angular, RESISTANCE_QUANTUM};

/// Hardware description of the circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub inductance_nh: [f64; 2],
    pub capacitance_ff: [f64; 2],
    /// Single-junction Josephson energy `E_J0`, in GHz (energy / h).
    pub junction_energy_ghz: f64,
    /// `Φ_ext / Φ_0`.
    pub flux_ratio: f64,
    /// Qubit charging energy `E_c`, GHz.
    pub charging_energy_ghz: f64,
    /// Qubit Josephson coupling `E_Jq`, GHz.
    pub qubit_josephson_ghz: f64,
    /// Bias voltage in µV. `None` means "tune to resonance".
    pub bias_voltage_uv: Option<f64>,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, reason: format!("must be finite and > 0, got {v}") })
            }
        };
        positive("inductance_1", self.inductance_nh[0])?;
        positive("inductance_2", self.inductance_nh[1])?;
        positive("capacitance_1", self.capacitance_ff[0])?;
        positive("capacitance_2", self.capacitance_ff[1])?;
        positive("junction_energy", self.junction_energy_ghz)?;
        positive("charging_energy", self.charging_energy_ghz)?;
        positive("qubit_josephson", self.qubit_josephson_ghz)?;
        if let Some(v) = self.bias_voltage_uv {
            positive("bias_voltage", v)?;
        }
        if !(self.flux_ratio.is_finite() && (0.0..1.0).contains(&self.flux_ratio)) {
            return Err(ModelError::InvalidParameter {
                name: "flux_ratio",
                reason: format!("must lie in [0, 1), got {}", self.flux_ratio),
            });
        }
        if self.charging_energy_ghz <= self.qubit_josephson_ghz {
            return Err(ModelError::InvalidParameter {
                name: "charging_energy",
                reason: format!(
                    "charge-qubit regime needs E_c > E_Jq, got E_c = {} GHz, E_Jq = {} GHz",
                    self.charging_energy_ghz, self.qubit_josephson_ghz
                ),
            });
        }
        Ok(())
    }

    /// Characteristic impedance `sqrt(L/C)` of resonator `j` (0-based), Ω.
    pub fn impedance_ohm(&self, j: usize) -> f64 {
        (self.inductance_nh[j] * 1e-9 / (self.capacitance_ff[j] * 1e-15)).sqrt()
    }

    /// `1/sqrt(LC)` of resonator `j` (0-based), rad/ns.
    pub fn resonator_frequency(&self, j: usize) -> f64 {
        1.0 / (self.inductance_nh[j] * 1e-9 * self.capacitance_ff[j] * 1e-15).sqrt() * 1e-9
    }

    /// Effective SQUID Josephson energy `2 E_J0 cos(π Φ/Φ0)`, GHz.
    pub fn effective_josephson_ghz(&self) -> f64 {
        2.0 * self.junction_energy_ghz * (PI * self.flux_ratio).cos()
    }
}

/// Zero-point coupling `sqrt(π Z / R_K)`.
pub fn coupling_from_impedance(z_ohm: f64) -> f64 {
    (PI * z_ohm / RESISTANCE_QUANTUM).sqrt()
}

/// Constants of the two-level + two-mode model. All frequencies and rates
/// are angular, in rad/ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_1: f64,
    pub omega_2: f64,
    pub delta: f64,
    pub e_j: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub omega_j: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Largest Fock index kept in each cavity.
    pub cutoff: usize,
}

impl Default for ModelParams {
    /// ω1/2π = 9, ω2/2π = 7, δ/2π = 5, E_J/2π = 0.5 GHz, λ = 0.2, κ/2π = 0.1 GHz,
    /// γ/κ = 0.1, cutoff 5, ω_J on exact resonance.
    fn default() -> Self {
        UserModelParams::default().to_internal()
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") })
            }
        };
        nonneg("omega_1", self.omega_1)?;
        nonneg("omega_2", self.omega_2)?;
        nonneg("delta", self.delta)?;
        nonneg("e_j", self.e_j)?;
        nonneg("omega_j", self.omega_j)?;
        nonneg("kappa", self.kappa)?;
        nonneg("gamma", self.gamma)?;
        for (name, l) in [("lambda_1", self.lambda_1), ("lambda_2", self.lambda_2)] {
            if !(l.is_finite() && (0.0..1.0).contains(&l)) {
                return Err(ModelError::InvalidParameter { name, reason: format!("must lie in [0, 1), got {l}") });
            }
        }
        if self.cutoff < 2 {
            return Err(ModelError::InvalidParameter {
                name: "cutoff",
                reason: format!("must be >= 2, got {}", self.cutoff),
            });
        }
        Ok(())
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::symmetric(self.cutoff)
    }

    /// Resonance target `δ + ω1 + ω2`.
    pub fn resonance_target(&self) -> f64 {
        self.delta + self.omega_1 + self.omega_2
    }

    /// Sets ω_J from the bias voltage that meets the resonance condition.
    pub fn tuned_to_resonance(mut self) -> Self {
        self.omega_j = units::josephson_frequency(super::solve_bias_voltage(&self));
        self
    }

    pub fn with_gamma_over_kappa(mut self, ratio: f64) -> Self {
        self.gamma = ratio * self.kappa;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn gamma_over_kappa(&self) -> f64 {
        self.gamma / self.kappa
    }

    pub fn to_user(&self) -> UserModelParams {
        UserModelParams {
            omega_1_ghz: angular_to_ghz(self.omega_1),
            omega_2_ghz: angular_to_ghz(self.omega_2),
            delta_ghz: angular_to_ghz(self.delta),
            e_j_ghz: angular_to_ghz(self.e_j),
            lambda_1: self.lambda_1,
            lambda_2: self.lambda_2,
            omega_j_ghz: Some(angular_to_ghz(self.omega_j)),
            kappa_ghz: angular_to_ghz(self.kappa),
            gamma_ghz: angular_to_ghz(self.gamma),
            cutoff: self.cutoff,
        }
    }
}

/// [`ModelParams`] in user units: ordinary frequencies in GHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserModelParams {
    pub omega_1_ghz: f64,
    pub omega_2_ghz: f64,
    pub delta_ghz: f64,
    pub e_j_ghz: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
    /// `None` tunes ω_J to resonance.
    pub omega_j_ghz: Option<f64>,
    pub kappa_ghz: f64,
    pub gamma_ghz: f64,
    pub cutoff: usize,
}

impl Default for UserModelParams {
    fn default() -> Self {
        Self {
            omega_1_ghz: 9.0,
            omega_2_ghz: 7.0,
            delta_ghz: 5.0,
            e_j_ghz: 0.5,
            lambda_1: 0.2,
            lambda_2: 0.2,
            omega_j_ghz: None,
            kappa_ghz: 0.1,
            gamma_ghz: 0.01,
            cutoff: 5,
        }
    }
}

impl UserModelParams {
    pub fn to_internal(&self) -> ModelParams {
        let m = ModelParams {
            omega_1: ghz_to_angular(self.omega_1_ghz),
            omega_2: ghz_to_angular(self.omega_2_ghz),
            delta: ghz_to_angular(self.delta_ghz),
            e_j: ghz_to_angular(self.e_j_ghz),
            lambda_1: self.lambda_1,
            lambda_2: self.lambda_2,
            omega_j: 0.0,
            kappa: ghz_to_angular(self.kappa_ghz),
            gamma: ghz_to_angular(self.gamma_ghz),
            cutoff: self.cutoff,
        };
        match self.omega_j_ghz {
            Some(f) => ModelParams { omega_j: ghz_to_angular(f), ..m },
            None => m.tuned_to_resonance(),
        }
    }
}

/// Maps hardware values onto the model constants.
///
/// `kappa` and `gamma` are in rad/ns. Without a bias voltage the Josephson
/// frequency is placed on resonance.
pub fn circuit_to_model(c: &CircuitParams, kappa: f64, gamma: f64, cutoff: usize) -> Result<ModelParams, ModelError> {
    c.validate()?;
    let e_j_ghz = c.effective_josephson_ghz();
    if e_j_ghz < -1e-12 * c.junction_energy_ghz {
        return Err(ModelError::NegativeJosephsonEnergy { flux_ratio: c.flux_ratio, e_j_ghz });
    }
    let m = ModelParams {
        omega_1: c.resonator_frequency(0),
        omega_2: c.resonator_frequency(1),
        delta: ghz_to_angular(c.qubit_josephson_ghz),
        e_j: ghz_to_angular(e_j_ghz.max(0.0)),
        lambda_1: coupling_from_impedance(c.impedance_ohm(0)),
        lambda_2: coupling_from_impedance(c.impedance_ohm(1)),
        omega_j: 0.0,
        kappa,
        gamma,
        cutoff,
    };
    let m = match c.bias_voltage_uv {
        Some(v) => ModelParams { omega_j: units::josephson_frequency(v), ..m },
        None => m.tuned_to_resonance(),
    };
    m.validate()?;
    Ok(m)
}
