use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DynamicsError, OperatorError};
use crate::operators::{max_abs_diff, BasisLabel, CMatrix, SpaceLayout, ONE};

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(DVector<Complex64>),
    Density(CMatrix),
}

/// Pure state or density matrix on the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    layout: SpaceLayout,
    data: StateData,
}

/// Measured deviations of a density matrix from its defining properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityCheck {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl QuantumState {
    pub fn basis(layout: SpaceLayout, label: BasisLabel) -> Result<Self, OperatorError> {
        let k = layout.label_index(label)?;
        let mut v = DVector::zeros(layout.dim());
        v[k] = ONE;
        Ok(Self { layout, data: StateData::Pure(v) })
    }

    pub fn basis_density(layout: SpaceLayout, label: BasisLabel) -> Result<Self, OperatorError> {
        Ok(Self::basis(layout, label)?.to_density())
    }

    /// Pure state; rejected unless `| ‖ψ‖ − 1 | < 1e-9`.
    pub fn pure(layout: SpaceLayout, psi: DVector<Complex64>) -> Result<Self, OperatorError> {
        if psi.len() != layout.dim() {
            return Err(OperatorError::DimensionMismatch { expected: layout.dim(), rows: psi.len(), cols: 1 });
        }
        let drift = (psi.norm() - 1.0).abs();
        if drift >= 1e-9 {
            return Err(OperatorError::InvalidArgument(format!("state vector norm off by {drift:e}")));
        }
        Ok(Self { layout, data: StateData::Pure(psi) })
    }

    /// Density matrix; only the shape is checked here, see [`Self::density_check`].
    pub fn density(layout: SpaceLayout, rho: CMatrix) -> Result<Self, OperatorError> {
        if rho.nrows() != layout.dim() || rho.ncols() != layout.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: layout.dim(),
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        Ok(Self { layout, data: StateData::Density(rho) })
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&DVector<Complex64>> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&CMatrix> {
        match &self.data {
            StateData::Density(m) => Some(m),
            StateData::Pure(_) => None,
        }
    }

    pub fn to_density(&self) -> Self {
        match &self.data {
            StateData::Pure(v) => Self { layout: self.layout, data: StateData::Density(v * v.adjoint()) },
            StateData::Density(_) => self.clone(),
        }
    }

    /// Probability of a basis state.
    pub fn population(&self, label: BasisLabel) -> Result<f64, OperatorError> {
        let k = self.layout.label_index(label)?;
        Ok(match &self.data {
            StateData::Pure(v) => v[k].norm_sqr(),
            StateData::Density(m) => m[(k, k)].re,
        })
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        match &self.data {
            StateData::Pure(v) => (v.adjoint() * op * v)[(0, 0)],
            StateData::Density(m) => crate::operators::trace_product(op, m),
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.norm_squared().powi(2),
            StateData::Density(m) => crate::operators::trace_product(m, m).re,
        }
    }

    pub fn density_check(&self) -> DensityCheck {
        match &self.data {
            StateData::Pure(v) => DensityCheck {
                trace_error: (v.norm_squared() - 1.0).abs(),
                hermiticity_error: 0.0,
                min_eigenvalue: 0.0,
            },
            StateData::Density(m) => check_density_matrix(m),
        }
    }
}

pub(crate) fn check_density_matrix(m: &CMatrix) -> DensityCheck {
    let trace = m.trace();
    let herm = max_abs_diff(m, &m.adjoint());
    DensityCheck {
        trace_error: (trace - ONE).norm(),
        hermiticity_error: herm,
        min_eigenvalue: min_hermitian_eigenvalue(m),
    }
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d: DMatrix<Complex64> = a - b;
    let h = (&d + d.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrajectoryDiagnostics {
    pub max_norm_drift: f64,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    /// Smallest eigenvalue seen at any output point (density evolution only).
    pub min_eigenvalue: f64,
    pub ode: super::OdeStats,
}

/// Observables sampled on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub states: Option<Vec<QuantumState>>,
    pub diagnostics: TrajectoryDiagnostics,
}

impl Trajectory {
    pub(crate) fn new(times: Vec<f64>, names: Vec<String>, store_states: bool) -> Self {
        let n = times.len();
        Self {
            series: names.into_iter().map(|name| Series { name, values: Vec::with_capacity(n) }).collect(),
            states: store_states.then(|| Vec::with_capacity(n)),
            times,
            diagnostics: TrajectoryDiagnostics { min_eigenvalue: f64::INFINITY, ..Default::default() },
        }
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    pub fn final_state(&self) -> Option<&QuantumState> {
        self.states.as_ref().and_then(|s| s.last())
    }

    /// Grid strictly increasing and every series as long as the grid.
    pub fn is_consistent(&self) -> bool {
        self.times.windows(2).all(|w| w[1] > w[0]) && self.series.iter().all(|s| s.values.len() == self.times.len())
    }
}

pub(crate) fn require_density(state: &QuantumState) -> Result<&CMatrix, DynamicsError> {
    state.as_density().ok_or(DynamicsError::WrongStateKind { expected: "density-matrix" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::QubitLevel;

    #[test]
    fn pure_state_checks_norm() {
        let l = SpaceLayout::symmetric(1);
        let mut v = DVector::zeros(l.dim());
        v[0] = Complex64::new(0.5, 0.0);
        assert!(QuantumState::pure(l, v.clone()).is_err());
        v[1] = Complex64::new(0.0, 0.75f64.sqrt());
        let s = QuantumState::pure(l, v).unwrap();
        let d = s.to_density();
        let c = d.density_check();
        assert!(c.trace_error < 1e-15 && c.hermiticity_error == 0.0 && c.min_eigenvalue > -1e-15);
        assert!((d.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let l = SpaceLayout::symmetric(1);
        let a = QuantumState::basis_density(l, BasisLabel::new(0, 0, QubitLevel::Ground)).unwrap();
        let b = QuantumState::basis_density(l, BasisLabel::new(1, 1, QubitLevel::Excited)).unwrap();
        let d = trace_distance(a.as_density().unwrap(), b.as_density().unwrap());
        assert!((d - 1.0).abs() < 1e-14);
    }
}
