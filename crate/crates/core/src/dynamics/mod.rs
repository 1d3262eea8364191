//! Closed and open evolution, steady states and two-time correlators.

mod evolve;
mod liouvillian;
mod ode;
mod regression;
mod state;
mod steady;

pub use evolve::{
    lindblad_evolve, schrodinger_evolve, HamiltonianSource, Observable, HERMITICITY_LIMIT, NORM_DRIFT_LIMIT,
    POSITIVITY_FLOOR, TRACE_LIMIT,
};
pub use liouvillian::{build_liouvillian, Jump, Liouvillian, Sector};
pub use ode::{integrate, IntegratorOptions, OdeStats};
pub use regression::{regression_correlator, CorrelationSeries, EMISSION_FLOOR};
pub use state::{trace_distance, DensityCheck, QuantumState, Series, StateData, Trajectory, TrajectoryDiagnostics};
pub use steady::{steady_state, SteadyState, UNIQUENESS_GAP};
