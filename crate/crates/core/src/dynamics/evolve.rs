//! Closed and open time evolution on a grid.

use num_complex::Complex64;

use super::liouvillian::Liouvillian;
use super::ode::{integrate, IntegratorOptions};
use super::state::{check_density_matrix, QuantumState, Trajectory};
use crate::error::DynamicsError;
use crate::model::InteractionHamiltonian;
use crate::operators::{BasisLabel, CMatrix, QuantumOperator, I, ZERO};

/// Largest tolerated `| ‖ψ‖ − 1 |` before a closed evolution is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
pub const TRACE_LIMIT: f64 = 1e-8;
pub const HERMITICITY_LIMIT: f64 = 1e-8;
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// Anything that can produce `H(t) ψ`.
pub trait HamiltonianSource: Sync {
    fn layout(&self) -> crate::operators::SpaceLayout;
    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]);
}

impl HamiltonianSource for QuantumOperator {
    fn layout(&self) -> crate::operators::SpaceLayout {
        QuantumOperator::layout(self)
    }

    fn apply(&self, _t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let m = self.matrix();
        let d = m.nrows();
        out.fill(ZERO);
        for c in 0..d {
            let x = psi[c];
            if x == ZERO {
                continue;
            }
            for r in 0..d {
                out[r] += m[(r, c)] * x;
            }
        }
    }
}

impl HamiltonianSource for InteractionHamiltonian {
    fn layout(&self) -> crate::operators::SpaceLayout {
        InteractionHamiltonian::layout(self)
    }

    fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        InteractionHamiltonian::apply(self, t, psi, out)
    }
}

/// A named observable sampled along a density-matrix trajectory.
#[derive(Clone, Debug)]
pub enum Observable {
    Population(BasisLabel),
    /// Real part of `Tr(O ρ)`.
    Expectation(String, CMatrix),
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::Population(l) => l.population_name(),
            Observable::Expectation(n, _) => n.clone(),
        }
    }
}

fn grid_checked(grid: &[f64]) -> Result<(), DynamicsError> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(DynamicsError::BadGrid);
    }
    Ok(())
}

/// Integrates `i dψ/dt = H(t) ψ` and records the requested populations.
pub fn schrodinger_evolve<H: HamiltonianSource + ?Sized>(
    h: &H,
    psi0: &QuantumState,
    grid: &[f64],
    labels: &[BasisLabel],
    opts: &IntegratorOptions,
    store_states: bool,
) -> Result<Trajectory, DynamicsError> {
    grid_checked(grid)?;
    let layout = h.layout();
    if psi0.layout() != layout {
        return Err(DynamicsError::LayoutMismatch);
    }
    let psi = psi0.as_vector().ok_or(DynamicsError::WrongStateKind { expected: "pure" })?;
    let drift0 = (psi.norm() - 1.0).abs();
    if drift0 >= 1e-9 {
        return Err(DynamicsError::NormDrift { t: grid[0], drift: drift0, limit: 1e-9 });
    }
    let idx = labels.iter().map(|&l| layout.label_index(l)).collect::<Result<Vec<_>, _>>()?;
    let mut traj = Trajectory::new(grid.to_vec(), labels.iter().map(|l| l.population_name()).collect(), store_states);
    let mut stored = Vec::new();
    let mut max_drift: f64 = 0.0;

    let stats = integrate(
        opts,
        |t, y, dy| {
            h.apply(t, y, dy);
            for z in dy.iter_mut() {
                *z *= -I;
            }
        },
        psi.as_slice(),
        grid,
        |k, t, y| {
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let drift = (norm - 1.0).abs();
            max_drift = max_drift.max(drift);
            if drift > NORM_DRIFT_LIMIT {
                return Err(DynamicsError::NormDrift { t, drift, limit: NORM_DRIFT_LIMIT });
            }
            for (s, &i) in traj.series.iter_mut().zip(&idx) {
                s.values.push(y[i].norm_sqr());
            }
            if store_states {
                let v = nalgebra::DVector::from_column_slice(y);
                stored.push(QuantumState::pure(layout, v / Complex64::new(norm, 0.0))?);
            }
            let _ = k;
            Ok(())
        },
    )?;
    traj.diagnostics.max_norm_drift = max_drift;
    traj.diagnostics.min_eigenvalue = 0.0;
    traj.diagnostics.ode = stats;
    if store_states {
        traj.states = Some(stored);
    }
    Ok(traj)
}

/// Integrates the master equation from `rho0`, checking trace, Hermiticity
/// and positivity at every grid point.
pub fn lindblad_evolve(
    l: &Liouvillian,
    rho0: &QuantumState,
    grid: &[f64],
    observables: &[Observable],
    opts: &IntegratorOptions,
    store_states: bool,
) -> Result<Trajectory, DynamicsError> {
    grid_checked(grid)?;
    let layout = l.layout();
    if rho0.layout() != layout {
        return Err(DynamicsError::LayoutMismatch);
    }
    let rho0 = rho0.to_density();
    let start = rho0.as_density().expect("converted to density");
    let d = layout.dim();
    let idx = observables
        .iter()
        .map(|o| match o {
            Observable::Population(lbl) => layout.label_index(*lbl).map(Some),
            Observable::Expectation(_, m) if m.nrows() != d || m.ncols() != d => {
                Err(crate::error::OperatorError::DimensionMismatch { expected: d, rows: m.nrows(), cols: m.ncols() })
            }
            Observable::Expectation(..) => Ok(None),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut traj = Trajectory::new(grid.to_vec(), observables.iter().map(Observable::name).collect(), store_states);
    let mut stored = Vec::new();
    let diag = &mut traj.diagnostics;
    let series = &mut traj.series;

    let stats = integrate(
        opts,
        |_, y, dy| l.apply_into(y, dy),
        start.as_slice(),
        grid,
        |_, t, y| {
            let rho = CMatrix::from_column_slice(d, d, y);
            let c = check_density_matrix(&rho);
            diag.max_trace_error = diag.max_trace_error.max(c.trace_error);
            diag.max_hermiticity_error = diag.max_hermiticity_error.max(c.hermiticity_error);
            diag.min_eigenvalue = diag.min_eigenvalue.min(c.min_eigenvalue);
            if c.trace_error > TRACE_LIMIT {
                return Err(DynamicsError::DensityInvariant {
                    t,
                    what: "trace error",
                    value: c.trace_error,
                    limit: TRACE_LIMIT,
                });
            }
            if c.hermiticity_error > HERMITICITY_LIMIT {
                return Err(DynamicsError::DensityInvariant {
                    t,
                    what: "hermiticity error",
                    value: c.hermiticity_error,
                    limit: HERMITICITY_LIMIT,
                });
            }
            if c.min_eigenvalue < POSITIVITY_FLOOR {
                return Err(DynamicsError::DensityInvariant {
                    t,
                    what: "min eigenvalue",
                    value: c.min_eigenvalue,
                    limit: POSITIVITY_FLOOR,
                });
            }
            for ((s, o), i) in series.iter_mut().zip(observables).zip(&idx) {
                s.values.push(match (o, i) {
                    (_, Some(k)) => rho[(*k, *k)].re,
                    (Observable::Expectation(_, m), None) => crate::operators::trace_product(m, &rho).re,
                    _ => unreachable!(),
                });
            }
            if store_states {
                stored.push(QuantumState::density(layout, rho)?);
            }
            Ok(())
        },
    )?;
    traj.diagnostics.ode = stats;
    if store_states {
        traj.states = Some(stored);
    }
    Ok(traj)
}
