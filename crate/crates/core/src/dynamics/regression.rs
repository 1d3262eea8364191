//! Two-time correlators from the quantum regression theorem.

use serde::Serialize;

use super::evolve::{lindblad_evolve, Observable};
use super::liouvillian::Liouvillian;
use super::ode::IntegratorOptions;
use super::state::{require_density, QuantumState};
use crate::error::DynamicsError;
use crate::operators::{trace_product, CMatrix, QuantumOperator};

/// Denominators below this are treated as an absent signal.
pub const EMISSION_FLOOR: f64 = 1e-14;

/// A normalized correlator on a delay grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationSeries {
    pub name: String,
    pub tau_ns: Vec<f64>,
    /// `κτ`, empty when the generator carries no cavity rate.
    pub kappa_tau: Vec<f64>,
    pub values: Vec<f64>,
    /// `Tr[P†P e^{Lτ}(X ρ X†)]` before normalization.
    pub raw: Vec<f64>,
    pub zero_delay: f64,
    /// `Tr[X†X ρ]`
    pub collapse_norm: f64,
    /// `Tr[P†P ρ]`
    pub probe_norm: f64,
}

/// `C(τ) = Tr[P†P e^{Lτ}(X ρ X†)] / (Tr[X†X ρ] Tr[P†P ρ])` with `X` the
/// collapse and `P` the probe operator. The grid must start at zero.
pub fn regression_correlator(
    l: &Liouvillian,
    rho_ss: &QuantumState,
    collapse: &QuantumOperator,
    probe: &QuantumOperator,
    tau_grid: &[f64],
    name: &str,
    opts: &IntegratorOptions,
) -> Result<CorrelationSeries, DynamicsError> {
    if tau_grid.first() != Some(&0.0) {
        return Err(DynamicsError::BadGrid);
    }
    if rho_ss.layout() != l.layout() || collapse.layout() != l.layout() || probe.layout() != l.layout() {
        return Err(DynamicsError::LayoutMismatch);
    }
    let rho = require_density(rho_ss)?;
    let x = collapse.matrix();
    let pp: CMatrix = probe.matrix().adjoint() * probe.matrix();
    let collapse_norm = trace_product(&(x.adjoint() * x), rho).re;
    let probe_norm = trace_product(&pp, rho).re;
    for (what, value) in [("collapse-operator number", collapse_norm), ("probe-operator number", probe_norm)] {
        if !(value >= EMISSION_FLOOR) {
            return Err(DynamicsError::NoEmission { what, value });
        }
    }

    let sigma0 = x * rho * x.adjoint() / num_complex::Complex64::new(collapse_norm, 0.0);
    let sigma0 = QuantumState::density(l.layout(), sigma0)?;
    let tr = lindblad_evolve(l, &sigma0, tau_grid, &[Observable::Expectation("probe".into(), pp)], opts, false)?;
    let conditional = &tr.series[0].values;
    let raw: Vec<f64> = conditional.iter().map(|v| v * collapse_norm).collect();
    let values: Vec<f64> = conditional.iter().map(|v| v / probe_norm).collect();
    let kappa_tau = l.kappa().map(|k| tau_grid.iter().map(|t| k * t).collect()).unwrap_or_default();
    Ok(CorrelationSeries {
        name: name.to_string(),
        tau_ns: tau_grid.to_vec(),
        kappa_tau,
        zero_delay: values[0],
        values,
        raw,
        collapse_norm,
        probe_norm,
    })
}
