//! Populations, steady-state photon correlators and the pair-emission rate.

use serde::Serialize;

pub use crate::dynamics::CorrelationSeries;
use crate::dynamics::{
    build_liouvillian, regression_correlator, steady_state, IntegratorOptions, Liouvillian, QuantumState, SteadyState,
    EMISSION_FLOOR,
};
use crate::error::{DynamicsError, OperatorError};
use crate::model::{build_h_eff, ModelParams};
use crate::operators::{ladder_ops, trace_product, BasisLabel, Cavity, QuantumOperator};
use crate::units::angular_to_ghz;

/// `(name, probability)` for each label.
pub fn populations(state: &QuantumState, labels: &[BasisLabel]) -> Result<Vec<(String, f64)>, OperatorError> {
    labels.iter().map(|&l| Ok((l.population_name(), state.population(l)?))).collect()
}

/// The four correlators of the pair-blockade analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Correlator {
    G11,
    G22,
    G12,
    G1212,
}

impl Correlator {
    pub const ALL: [Correlator; 4] = [Correlator::G11, Correlator::G22, Correlator::G12, Correlator::G1212];

    pub fn name(self) -> &'static str {
        match self {
            Correlator::G11 => "g11",
            Correlator::G22 => "g22",
            Correlator::G12 => "g12",
            Correlator::G1212 => "g1212",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Steady-state emission summary. `rate_per_ns` is `kappa * nbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmissionPoint {
    pub gamma_over_kappa: f64,
    /// rad/ns
    pub kappa: f64,
    pub n1: f64,
    pub n2: f64,
    /// Mean of the two cavity occupations.
    pub nbar: f64,
    /// photons/ns
    pub rate_per_ns: f64,
    pub rate_mhz: f64,
}

/// Master-equation generator and its steady state for one parameter set.
/// Immutable once built; all queries take `&self`.
#[derive(Clone, Debug)]
pub struct SteadyStateEngine {
    params: ModelParams,
    liouvillian: Liouvillian,
    steady: SteadyState,
    a1: QuantumOperator,
    a2: QuantumOperator,
    options: IntegratorOptions,
}

impl SteadyStateEngine {
    pub fn new(params: &ModelParams) -> Result<Self, DynamicsError> {
        Self::with_options(params, IntegratorOptions::default())
    }

    pub fn with_options(params: &ModelParams, options: IntegratorOptions) -> Result<Self, DynamicsError> {
        params.validate()?;
        let layout = params.layout();
        let h = build_h_eff(params, layout)?;
        let liouvillian = build_liouvillian(&h, params.kappa, params.gamma, layout)?;
        let steady = steady_state(&liouvillian)?;
        Ok(Self {
            params: params.clone(),
            a1: ladder_ops(layout, Cavity::First).0,
            a2: ladder_ops(layout, Cavity::Second).0,
            liouvillian,
            steady,
            options,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    pub fn steady(&self) -> &SteadyState {
        &self.steady
    }

    pub fn state(&self) -> &QuantumState {
        &self.steady.state
    }

    fn annihilator(&self, c: Cavity) -> &QuantumOperator {
        match c {
            Cavity::First => &self.a1,
            Cavity::Second => &self.a2,
        }
    }

    fn pair(&self) -> QuantumOperator {
        &self.a1 * &self.a2
    }

    /// `(collapse, probe)` for a correlator.
    fn operators(&self, c: Correlator) -> (QuantumOperator, QuantumOperator) {
        match c {
            Correlator::G11 => (self.a1.clone(), self.a1.clone()),
            Correlator::G22 => (self.a2.clone(), self.a2.clone()),
            Correlator::G12 => (self.a1.clone(), self.a2.clone()),
            Correlator::G1212 => (self.pair(), self.pair()),
        }
    }

    /// `⟨a†a⟩` in the steady state.
    pub fn occupation(&self, c: Cavity) -> f64 {
        let a = self.annihilator(c);
        trace_product(&(a.matrix().adjoint() * a.matrix()), self.state().as_density().expect("density")).re
    }

    pub fn g2_standard(&self, cavity: Cavity, tau_grid: &[f64]) -> Result<CorrelationSeries, DynamicsError> {
        self.correlator(if cavity == Cavity::First { Correlator::G11 } else { Correlator::G22 }, tau_grid)
    }

    pub fn g2_cross(&self, tau_grid: &[f64]) -> Result<CorrelationSeries, DynamicsError> {
        self.correlator(Correlator::G12, tau_grid)
    }

    pub fn g2_pair(&self, tau_grid: &[f64]) -> Result<CorrelationSeries, DynamicsError> {
        self.correlator(Correlator::G1212, tau_grid)
    }

    pub fn correlator(&self, c: Correlator, tau_grid: &[f64]) -> Result<CorrelationSeries, DynamicsError> {
        let (x, p) = self.operators(c);
        let r = regression_correlator(&self.liouvillian, self.state(), &x, &p, tau_grid, c.name(), &self.options);
        match (c, r) {
            (Correlator::G1212, Err(DynamicsError::NoEmission { what, value })) => {
                Err(DynamicsError::NoPairEmission { what, value })
            }
            (_, r) => r,
        }
    }

    /// Zero-delay value from steady-state moments alone:
    /// `⟨X†P†PX⟩ / (⟨X†X⟩⟨P†P⟩)`.
    pub fn direct_zero_delay(&self, c: Correlator) -> Result<f64, DynamicsError> {
        let (x, p) = self.operators(c);
        let rho = self.state().as_density().expect("density");
        let (x, p) = (x.matrix(), p.matrix());
        let pp = p.adjoint() * p;
        let num = trace_product(&(x.adjoint() * &pp * x), rho).re;
        let dx = trace_product(&(x.adjoint() * x), rho).re;
        let dp = trace_product(&pp, rho).re;
        for (what, value) in [("collapse-operator number", dx), ("probe-operator number", dp)] {
            if !(value >= EMISSION_FLOOR) {
                return Err(if c == Correlator::G1212 {
                    DynamicsError::NoPairEmission { what, value }
                } else {
                    DynamicsError::NoEmission { what, value }
                });
            }
        }
        Ok(num / (dx * dp))
    }

    pub fn emission_rate(&self) -> EmissionPoint {
        let n1 = self.occupation(Cavity::First);
        let n2 = self.occupation(Cavity::Second);
        let nbar = 0.5 * (n1 + n2);
        let kappa = self.params.kappa;
        let rate_per_ns = kappa * nbar;
        EmissionPoint {
            gamma_over_kappa: self.params.gamma / kappa,
            kappa,
            n1,
            n2,
            nbar,
            rate_per_ns,
            rate_mhz: rate_per_ns * 1e3,
        }
    }
}

/// `count` delays evenly spaced over `κτ ∈ [0, kappa_tau_max]`, in ns.
pub fn kappa_tau_grid(kappa: f64, kappa_tau_max: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![0.0];
    }
    (0..count).map(|k| kappa_tau_max * k as f64 / (count - 1) as f64 / kappa).collect()
}

/// κ in GHz for reporting.
pub fn kappa_ghz(p: &ModelParams) -> f64 {
    angular_to_ghz(p.kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::QubitLevel;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn engine() -> SteadyStateEngine {
        SteadyStateEngine::new(&ModelParams::default()).unwrap()
    }

    #[test]
    fn population_examples() {
        let layout = ModelParams::default().layout();
        let g = BasisLabel::new(0, 0, QubitLevel::Ground);
        let e = BasisLabel::new(1, 1, QubitLevel::Excited);
        let s = QuantumState::basis(layout, g).unwrap();
        assert_eq!(populations(&s, &[g, e]).unwrap(), vec![("P_00g".into(), 1.0), ("P_11e".into(), 0.0)]);
        let mut v = DVector::zeros(layout.dim());
        v[layout.label_index(g).unwrap()] = Complex64::new(0.5f64.sqrt(), 0.0);
        v[layout.label_index(e).unwrap()] = Complex64::new(0.0, 0.5f64.sqrt());
        let s = QuantumState::pure(layout, v).unwrap();
        for (_, p) in populations(&s, &[g, e]).unwrap() {
            assert!((p - 0.5).abs() < 1e-15);
        }
        assert!(populations(&s, &[BasisLabel::new(9, 0, QubitLevel::Ground)]).is_err());
    }

    #[test]
    fn zero_delay_reference_values() {
        // independent dense-generator reference at these parameters
        let e = engine();
        let expect = [
            (Correlator::G11, 0.13901057133993505),
            (Correlator::G22, 0.13901057133993505),
            (Correlator::G12, 14.343730606809862),
            (Correlator::G1212, 0.14195981867286991),
        ];
        for (c, v) in expect {
            let direct = e.direct_zero_delay(c).unwrap();
            assert!((direct - v).abs() < 1e-8 * v.max(1.0), "{c:?} {direct}");
        }
    }

    #[test]
    fn regression_matches_direct_at_zero_delay() {
        let e = engine();
        let grid = kappa_tau_grid(e.params().kappa, 1.0, 5);
        for c in Correlator::ALL {
            let s = e.correlator(c, &grid).unwrap();
            assert_eq!(s.zero_delay, s.values[0]);
            assert!((s.zero_delay - e.direct_zero_delay(c).unwrap()).abs() < 1e-8);
            assert!(s.values.iter().all(|v| v.is_finite() && *v >= -1e-10));
            assert_eq!(s.kappa_tau.len(), grid.len());
        }
    }

    #[test]
    fn emission_rate_is_kappa_times_nbar() {
        let p = engine().emission_rate();
        assert_eq!(p.rate_per_ns, p.kappa * p.nbar);
        assert!((p.rate_mhz - 22.116540457996162).abs() < 1e-6, "{}", p.rate_mhz);
        assert!((p.gamma_over_kappa - 0.1).abs() < 1e-12);
    }

    #[test]
    fn no_emission_without_drive() {
        let e = SteadyStateEngine::new(&ModelParams { e_j: 0.0, ..ModelParams::default() }).unwrap();
        let grid = [0.0, 1.0];
        assert!(matches!(e.g2_standard(Cavity::First, &grid), Err(DynamicsError::NoEmission { .. })));
        assert!(matches!(e.g2_pair(&grid), Err(DynamicsError::NoPairEmission { .. })));
        assert_eq!(e.emission_rate().rate_per_ns, 0.0);
    }

    #[test]
    fn grid_helper() {
        let g = kappa_tau_grid(0.5, 10.0, 401);
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert!((g[400] - 20.0).abs() < 1e-12);
        assert_eq!(Correlator::from_name("g1212"), Some(Correlator::G1212));
    }
}
