//! Lindblad generator.
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_k c_k (2 o_k ρ o_k† − o_k†o_k ρ − ρ o_k†o_k)
//! ```
//!
//! with `c = κ/2` for each cavity and `c = γ/2` for the qubit. Density
//! matrices are vectorized by stacking columns, which is also nalgebra's
//! storage order, so `vec(ρ)[i + j d] = ρ[i, j]`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::DynamicsError;
use crate::operators::{ladder_ops, qubit_ops, CMatrix, Cavity, QuantumOperator, SpaceLayout, I, ZERO};

/// Structural nonzeros of a matrix as `(row, col, value)`.
#[derive(Clone, Debug, Default)]
struct Sparse {
    entries: Vec<(usize, usize, Complex64)>,
    by_col: Vec<Vec<(usize, Complex64)>>,
}

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        let mut by_col = vec![Vec::new(); m.ncols()];
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                    by_col[c].push((r, v));
                }
            }
        }
        Self { entries, by_col }
    }
}

#[derive(Clone, Debug)]
pub struct Jump {
    pub name: String,
    /// Prefactor `c` in front of `2oρo† − o†oρ − ρo†o`.
    pub coefficient: f64,
    pub operator: QuantumOperator,
}

#[derive(Clone, Debug)]
pub struct Liouvillian {
    layout: SpaceLayout,
    hamiltonian: QuantumOperator,
    jumps: Vec<Jump>,
    kappa: Option<f64>,
    /// `H − i Σ c o†o`
    k_eff: Sparse,
    /// `(2c, o)`
    jump_terms: Vec<(f64, Sparse)>,
}

/// Generator of the model's master equation: cavity decay `κ` on each
/// resonator and qubit decay `γ`.
pub fn build_liouvillian(
    hamiltonian: &QuantumOperator,
    kappa: f64,
    gamma: f64,
    layout: SpaceLayout,
) -> Result<Liouvillian, DynamicsError> {
    if hamiltonian.layout() != layout {
        return Err(DynamicsError::LayoutMismatch);
    }
    let (a1, _) = ladder_ops(layout, Cavity::First);
    let (a2, _) = ladder_ops(layout, Cavity::Second);
    let sm = qubit_ops(layout).sigma_minus;
    let jumps = vec![
        Jump { name: "a1".into(), coefficient: 0.5 * kappa, operator: a1 },
        Jump { name: "a2".into(), coefficient: 0.5 * kappa, operator: a2 },
        Jump { name: "sigma_minus".into(), coefficient: 0.5 * gamma, operator: sm },
    ];
    let mut l = Liouvillian::new(hamiltonian.clone(), jumps)?;
    l.kappa = Some(kappa);
    Ok(l)
}

impl Liouvillian {
    pub fn new(hamiltonian: QuantumOperator, jumps: Vec<Jump>) -> Result<Self, DynamicsError> {
        let scale = hamiltonian.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let herm = hamiltonian.hermiticity_error();
        if herm >= 1e-12 * scale {
            return Err(DynamicsError::NonHermitian(herm));
        }
        let layout = hamiltonian.layout();
        let mut k = hamiltonian.matrix().clone();
        let mut jump_terms = Vec::with_capacity(jumps.len());
        for j in &jumps {
            if j.operator.layout() != layout {
                return Err(DynamicsError::LayoutMismatch);
            }
            if j.coefficient == 0.0 {
                continue;
            }
            let o = j.operator.matrix();
            k -= (o.adjoint() * o) * (I * j.coefficient);
            jump_terms.push((2.0 * j.coefficient, Sparse::from_dense(o)));
        }
        Ok(Self { layout, k_eff: Sparse::from_dense(&k), hamiltonian, jumps, kappa: None, jump_terms })
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn hamiltonian(&self) -> &QuantumOperator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Cavity decay rate when built by [`build_liouvillian`].
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    /// `out = L[ρ]` on column-stacked `d × d` storage.
    pub fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.layout.dim();
        debug_assert_eq!(rho.len(), d * d);
        out.fill(ZERO);
        let mi = -I;
        // −i K ρ
        for &(r, c, v) in &self.k_eff.entries {
            let w = mi * v;
            for j in 0..d {
                out[r + j * d] += w * rho[c + j * d];
            }
        }
        // + i ρ K†: column j of the result gathers conj(K[j, k]) · column k of ρ
        for &(j, k, v) in &self.k_eff.entries {
            let w = I * v.conj();
            let (src, dst) = (k * d, j * d);
            for i in 0..d {
                out[dst + i] += w * rho[src + i];
            }
        }
        for (w, o) in &self.jump_terms {
            for &(r1, c1, v1) in &o.entries {
                for &(r2, c2, v2) in &o.entries {
                    out[r1 + r2 * d] += v1 * v2.conj() * *w * rho[c1 + c2 * d];
                }
            }
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.layout.dim();
        let mut out = CMatrix::zeros(d, d);
        self.apply_into(rho.as_slice(), out.as_mut_slice());
        out
    }

    /// Full `d² × d²` generator under column stacking:
    /// `−i (I ⊗ K) + i (K̄ ⊗ I) + Σ 2c (ō ⊗ o)`.
    pub fn to_dense(&self) -> CMatrix {
        let d = self.layout.dim();
        let id = CMatrix::identity(d, d);
        let mut k = self.hamiltonian.matrix().clone();
        for j in &self.jumps {
            let o = j.operator.matrix();
            k -= (o.adjoint() * o) * (I * j.coefficient);
        }
        let mut l = id.kronecker(&k) * (-I) + k.map(|z| z.conj()).kronecker(&id) * I;
        for j in &self.jumps {
            let o = j.operator.matrix();
            l += o.map(|z| z.conj()).kronecker(o) * Complex64::new(2.0 * j.coefficient, 0.0);
        }
        l
    }

    /// Smallest set of matrix units `|i⟩⟨j|` containing `seeds` that the
    /// generator maps into itself.
    pub fn invariant_sector(&self, seeds: impl IntoIterator<Item = (usize, usize)>) -> Sector {
        let mut elements = Vec::new();
        let mut position = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        let mut visit = |u: (usize, usize), queue: &mut std::collections::VecDeque<_>| {
            if let std::collections::hash_map::Entry::Vacant(v) = position.entry(u) {
                v.insert(elements.len());
                elements.push(u);
                queue.push_back(u);
            }
        };
        for s in seeds {
            visit(s, &mut queue);
        }
        while let Some((i, j)) = queue.pop_front() {
            for u in self.targets(i, j) {
                visit(u, &mut queue);
            }
        }
        Sector { elements, position }
    }

    /// Matrix units reached from `|i⟩⟨j|` in one application, with weights.
    fn image(&self, i: usize, j: usize) -> Vec<((usize, usize), Complex64)> {
        let mut out = Vec::new();
        for &(r, v) in &self.k_eff.by_col[i] {
            out.push(((r, j), -I * v));
        }
        for &(r, v) in &self.k_eff.by_col[j] {
            out.push(((i, r), I * v.conj()));
        }
        for (w, o) in &self.jump_terms {
            for &(r1, v1) in &o.by_col[i] {
                for &(r2, v2) in &o.by_col[j] {
                    out.push(((r1, r2), v1 * v2.conj() * *w));
                }
            }
        }
        out
    }

    fn targets(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.image(i, j).into_iter().map(|(e, _)| e)
    }

    /// The generator restricted to an invariant sector, in the sector's
    /// element order.
    pub fn sector_generator(&self, sector: &Sector) -> CMatrix {
        let n = sector.len();
        let mut m = CMatrix::zeros(n, n);
        for (col, &(i, j)) in sector.elements.iter().enumerate() {
            for (e, v) in self.image(i, j) {
                let row = sector.position[&e];
                m[(row, col)] += v;
            }
        }
        m
    }
}

/// An invariant set of matrix units.
#[derive(Clone, Debug)]
pub struct Sector {
    elements: Vec<(usize, usize)>,
    position: HashMap<(usize, usize), usize>,
}

impl Sector {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(usize, usize)] {
        &self.elements
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.position.get(&(i, j)).copied()
    }

    pub fn gather(&self, rho: &CMatrix) -> Vec<Complex64> {
        self.elements.iter().map(|&(i, j)| rho[(i, j)]).collect()
    }

    pub fn scatter(&self, coeffs: &[Complex64], d: usize) -> CMatrix {
        let mut rho = CMatrix::zeros(d, d);
        for (&(i, j), &c) in self.elements.iter().zip(coeffs) {
            rho[(i, j)] = c;
        }
        rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h_eff, ModelParams};
    use crate::operators::max_abs_diff;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let m = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn small() -> (ModelParams, Liouvillian) {
        let p = ModelParams { cutoff: 2, ..ModelParams::default() };
        let h = build_h_eff(&p, p.layout()).unwrap();
        let l = build_liouvillian(&h, p.kappa, p.gamma, p.layout()).unwrap();
        (p, l)
    }

    #[test]
    fn apply_matches_column_stacked_generator() {
        let (p, l) = small();
        let d = p.layout().dim();
        let dense = l.to_dense();
        assert_eq!(dense.nrows(), d * d);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho =
            CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let via_apply = l.apply(&rho);
        let via_dense = &dense * nalgebra::DVector::from_column_slice(rho.as_slice());
        let worst = via_apply.as_slice().iter().zip(via_dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn trace_is_preserved() {
        let (p, l) = small();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let rho = random_hermitian(p.layout().dim(), &mut rng);
            assert!(l.apply(&rho).trace().norm() < 1e-10);
        }
        // trace functional annihilates the dense generator from the left
        let dense = l.to_dense();
        let d = p.layout().dim();
        for col in 0..d * d {
            let s: Complex64 = (0..d).map(|i| dense[(i + i * d, col)]).sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let layout = SpaceLayout::symmetric(2);
        let (a, _) = ladder_ops(layout, Cavity::First);
        let err = build_liouvillian(&a, 1.0, 0.1, layout).unwrap_err();
        assert!(matches!(err, DynamicsError::NonHermitian(_)));
    }

    #[test]
    fn sector_is_invariant_and_small() {
        let (p, l) = small();
        let d = p.layout().dim();
        let sector = l.invariant_sector((0..d).map(|i| (i, i)));
        assert!(sector.len() <= 2 * d, "{}", sector.len());
        let gen = l.sector_generator(&sector);
        // restricted generator agrees with the full apply on sector operators
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coeffs: Vec<Complex64> = (0..sector.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let rho = sector.scatter(&coeffs, d);
        let full = l.apply(&rho);
        let restricted = &gen * nalgebra::DVector::from_vec(coeffs);
        let back = sector.scatter(restricted.as_slice(), d);
        assert!(max_abs_diff(&full, &back) < 1e-14);
    }
}
