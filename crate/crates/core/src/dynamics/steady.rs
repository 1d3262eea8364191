//! Stationary solution of the master equation.
//!
//! The generator conserves the differences of excitation numbers between
//! subsystems, so the populations only couple to a small set of matrix units.
//! The solve is carried out on that invariant set, found from the generator's
//! sparsity pattern starting from the diagonal.

use nalgebra::DVector;
use num_complex::Complex64;

use super::liouvillian::Liouvillian;
use super::state::{check_density_matrix, DensityCheck, QuantumState};
use crate::error::DynamicsError;
use crate::operators::{ONE, ZERO};

/// Required ratio between the two smallest singular values of the generator.
pub const UNIQUENESS_GAP: f64 = 1e3;

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub state: QuantumState,
    /// `‖L[ρ_ss]‖_F`
    pub residual: f64,
    pub smallest_singular: f64,
    pub second_singular: f64,
    /// Number of matrix units in the solved block.
    pub sector_dim: usize,
    pub check: DensityCheck,
}

/// Solves `L[ρ] = 0`, `Tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState, DynamicsError> {
    let layout = l.layout();
    let d = layout.dim();
    let sector = l.invariant_sector((0..d).map(|i| (i, i)));
    let mut gen = l.sector_generator(&sector);
    let k = sector.len();

    let mut sv: Vec<f64> = gen.clone().singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let (smallest, second) = (sv[0], sv.get(1).copied().unwrap_or(f64::INFINITY));
    if !(second > UNIQUENESS_GAP * smallest) {
        return Err(DynamicsError::DegenerateSteadyState { smallest, second });
    }

    // trace functional replaces the first equation
    for col in 0..k {
        let (i, j) = sector.elements()[col];
        gen[(0, col)] = if i == j { ONE } else { ZERO };
    }
    let mut rhs = DVector::from_element(k, ZERO);
    rhs[0] = ONE;
    let x = gen.lu().solve(&rhs).ok_or(DynamicsError::SingularSystem)?;
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(DynamicsError::SingularSystem);
    }
    let mut rho = sector.scatter(x.as_slice(), d);
    // the solve is exact only up to rounding; restore Hermiticity symmetrically
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);

    let residual = l.apply(&rho).norm();
    let check = check_density_matrix(&rho);
    Ok(SteadyState {
        state: QuantumState::density(layout, rho)?,
        residual,
        smallest_singular: smallest,
        second_singular: second,
        sector_dim: k,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_liouvillian;
    use crate::model::{build_h_eff, ModelParams};
    use crate::operators::{ladder_ops, BasisLabel, Cavity, QuantumOperator, QubitLevel};

    fn solve(p: &ModelParams) -> Result<SteadyState, DynamicsError> {
        let h = build_h_eff(p, p.layout()).unwrap();
        steady_state(&build_liouvillian(&h, p.kappa, p.gamma, p.layout()).unwrap())
    }

    #[test]
    fn vacuum_without_drive() {
        let p = ModelParams { e_j: 0.0, ..ModelParams::default() };
        let ss = solve(&p).unwrap();
        let ground = BasisLabel::new(0, 0, QubitLevel::Ground);
        assert!((ss.state.population(ground).unwrap() - 1.0).abs() < 1e-12);
        assert!(ss.residual < 1e-12);
    }

    #[test]
    fn symmetric_occupations_and_small_residual() {
        let p = ModelParams::default();
        let ss = solve(&p).unwrap();
        assert!(ss.residual < 1e-10, "{}", ss.residual);
        assert!(ss.check.trace_error < 1e-12 && ss.check.min_eigenvalue > -1e-12);
        let (a1, _) = ladder_ops(p.layout(), Cavity::First);
        let (a2, _) = ladder_ops(p.layout(), Cavity::Second);
        let n = |a: &QuantumOperator| ss.state.expectation(&(&a.dagger() * a).into_matrix()).re;
        let (n1, n2) = (n(&a1), n(&a2));
        assert!(n1 > 0.0 && n1 < 1.0);
        assert!((n1 - n2).abs() < 1e-8);
        // independent high-precision reference for these parameters
        assert!((n1 - 0.03519956737981982).abs() < 1e-9, "{n1}");
        assert_eq!(ss.sector_dim, 122);
    }

    #[test]
    fn degenerate_without_dissipation() {
        let p = ModelParams { kappa: 0.0, gamma: 0.0, ..ModelParams::default() };
        assert!(matches!(solve(&p), Err(DynamicsError::DegenerateSteadyState { .. })));
    }
}
