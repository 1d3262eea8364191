use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("basis index out of range: {component} = {value} exceeds maximum {max}")]
    IndexOutOfRange { component: &'static str, value: usize, max: usize },
    #[error("matrix is {rows}x{cols}, layout requires {expected}x{expected}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("{0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error(
        "flux ratio {flux_ratio} gives a negative effective Josephson energy ({e_j_ghz} GHz); \
         shift the flux into [0, 0.5]"
    )]
    NegativeJosephsonEnergy { flux_ratio: f64, e_j_ghz: f64 },
    #[error("degenerate cavities (omega_1 = omega_2); the scheme needs nondegenerate resonators")]
    DegenerateCavities,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("step size underflow at t = {t} ns (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("integrator exceeded {max_steps} steps before t = {t} ns")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite value in the integrated state at t = {t} ns")]
    NonFinite { t: f64 },
    #[error("norm drift {drift:e} exceeds {limit:e} at t = {t} ns")]
    NormDrift { t: f64, drift: f64, limit: f64 },
    #[error("density matrix invariant violated at t = {t} ns: {what} = {value:e} (limit {limit:e})")]
    DensityInvariant { t: f64, what: &'static str, value: f64, limit: f64 },
    #[error("time grid must be nonempty and strictly increasing")]
    BadGrid,
    #[error("Hamiltonian is not Hermitian (max |H - H†| = {0:e})")]
    NonHermitian(f64),
    #[error("steady state is not unique: singular values {smallest:e}, {second:e} (gap below 1e3)")]
    DegenerateSteadyState { smallest: f64, second: f64 },
    #[error("steady-state linear solve failed (singular system)")]
    SingularSystem,
    #[error("expected a {expected} state")]
    WrongStateKind { expected: &'static str },
    #[error("no emission: {what} = {value:e} is below 1e-14")]
    NoEmission { what: &'static str, value: f64 },
    #[error("no pair emission: {what} = {value:e} is below 1e-14")]
    NoPairEmission { what: &'static str, value: f64 },
    #[error("layout mismatch between state and generator")]
    LayoutMismatch,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
