//! Interaction-picture Hamiltonian and its resonant effective form.

use num_complex::Complex64;

use super::params::ModelParams;
use crate::error::ModelError;
use crate::operators::{
    displacement_block, frank_condon_unchecked, CMatrix, Cavity, QuantumOperator, QubitLevel, SpaceLayout, I, ONE, ZERO,
};

/// `g_eff^{n,m} = (E_J/4) β_n^{n+1}(λ1) β_m^{m+1}(λ2)`.
pub fn g_eff(n: usize, m: usize, params: &ModelParams) -> Complex64 {
    frank_condon_unchecked(n, 1, params.lambda_1) * frank_condon_unchecked(m, 1, params.lambda_2) * (0.25 * params.e_j)
}

/// `Σ_{n,m} g_eff^{n,m} |n,m,g⟩⟨n+1,m+1,e| + h.c.`
pub fn build_h_eff(params: &ModelParams, layout: SpaceLayout) -> Result<QuantumOperator, ModelError> {
    let (n1, n2) = (layout.cutoff(Cavity::First), layout.cutoff(Cavity::Second));
    if n1 < 1 || n2 < 1 {
        return Err(ModelError::InvalidParameter {
            name: "cutoff",
            reason: "effective Hamiltonian needs at least one photon per cavity".into(),
        });
    }
    let mut h = CMatrix::zeros(layout.dim(), layout.dim());
    for n in 0..n1 {
        for m in 0..n2 {
            let lower = layout.index_unchecked(n, m, QubitLevel::Ground);
            let upper = layout.index_unchecked(n + 1, m + 1, QubitLevel::Excited);
            let g = g_eff(n, m, params);
            h[(lower, upper)] = g;
            h[(upper, lower)] = g.conj();
        }
    }
    Ok(QuantumOperator::new(layout, h)?)
}

/// `H_I(t)` assembled from the closed-form displacement elements.
///
/// `D[α_j(t)]` with `α_j(t) = 2iλ_j e^{iω_j t}` is `P_j(t) D(2iλ_j) P_j(t)†`
/// with `P_j(t) = diag(e^{ikω_j t})`, so only the static blocks are kept and
/// every evaluation re-applies the phases for the requested `t`.
#[derive(Clone, Debug)]
pub struct InteractionHamiltonian {
    params: ModelParams,
    layout: SpaceLayout,
    d1: CMatrix,
    d2: CMatrix,
}

/// The three factors of `c · (D1 ⊗ D2 ⊗ Q)` at one time.
struct Factors {
    c: Complex64,
    d1: CMatrix,
    d2: CMatrix,
    q: [[Complex64; 2]; 2],
}

impl InteractionHamiltonian {
    pub fn new(params: &ModelParams, layout: SpaceLayout) -> Self {
        let d1 = displacement_block(Complex64::new(0.0, 2.0 * params.lambda_1), layout.fock_dim(Cavity::First));
        let d2 = displacement_block(Complex64::new(0.0, 2.0 * params.lambda_2), layout.fock_dim(Cavity::Second));
        Self { params: params.clone(), layout, d1, d2 }
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn rotate(base: &CMatrix, omega: f64, t: f64) -> CMatrix {
        let phases: Vec<Complex64> = (0..base.nrows()).map(|k| (I * (k as f64 * omega * t)).exp()).collect();
        CMatrix::from_fn(base.nrows(), base.ncols(), |r, c| base[(r, c)] * phases[r] * phases[c].conj())
    }

    fn factors(&self, t: f64) -> Factors {
        let p = &self.params;
        let c = (I * (p.omega_j * t)).exp() * (-0.25 * p.e_j);
        let up = (I * (p.delta * t)).exp();
        // σ+ e^{iδt} − σ− e^{−iδt} − σz, basis (g, e)
        let q = [[ONE, -up.conj()], [up, -ONE]];
        Factors { c, d1: Self::rotate(&self.d1, p.omega_1, t), d2: Self::rotate(&self.d2, p.omega_2, t), q }
    }

    /// Dense `H_I(t)`.
    pub fn at(&self, t: f64) -> QuantumOperator {
        let f = self.factors(t);
        let q = CMatrix::from_fn(2, 2, |r, c| f.q[r][c]);
        let m = f.d1.kronecker(&f.d2).kronecker(&q) * f.c;
        let h = &m + m.adjoint();
        QuantumOperator::new(self.layout, h).expect("factor sizes come from the layout")
    }

    /// `out = H_I(t) psi` without forming the dense matrix.
    pub fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let f = self.factors(t);
        let d1 = self.layout.fock_dim(Cavity::First);
        let d2 = self.layout.fock_dim(Cavity::Second);
        let mut tmp = vec![ZERO; psi.len()];
        let mut tmp2 = vec![ZERO; psi.len()];
        out.iter_mut().for_each(|z| *z = ZERO);
        for adjoint in [false, true] {
            let get_q = |r: usize, c: usize| if adjoint { f.q[c][r].conj() } else { f.q[r][c] };
            let get = |m: &CMatrix, r: usize, c: usize| if adjoint { m[(c, r)].conj() } else { m[(r, c)] };
            let coeff = if adjoint { f.c.conj() } else { f.c };
            // qubit factor
            for block in 0..d1 * d2 {
                let (g, e) = (psi[2 * block], psi[2 * block + 1]);
                tmp[2 * block] = get_q(0, 0) * g + get_q(0, 1) * e;
                tmp[2 * block + 1] = get_q(1, 0) * g + get_q(1, 1) * e;
            }
            // cavity 2 factor
            for n in 0..d1 {
                for m in 0..d2 {
                    for s in 0..2 {
                        let mut acc = ZERO;
                        for mp in 0..d2 {
                            acc += get(&f.d2, m, mp) * tmp[(n * d2 + mp) * 2 + s];
                        }
                        tmp2[(n * d2 + m) * 2 + s] = acc;
                    }
                }
            }
            // cavity 1 factor
            let stride = 2 * d2;
            for n in 0..d1 {
                for k in 0..stride {
                    let mut acc = ZERO;
                    for np in 0..d1 {
                        acc += get(&f.d1, n, np) * tmp2[np * stride + k];
                    }
                    out[n * stride + k] += coeff * acc;
                }
            }
        }
    }
}

pub fn build_h_i(t: f64, params: &ModelParams, layout: SpaceLayout) -> QuantumOperator {
    InteractionHamiltonian::new(params, layout).at(t)
}
