//! Truncated Fock-space and qubit operator algebra.
//!
//! The composite space is `cavity1 ⊗ cavity2 ⊗ qubit`. Basis vectors are
//! ordered with cavity 1 slowest and the qubit fastest:
//!
//! ```text
//! index(n, m, s) = (n * (N2 + 1) + m) * 2 + s      s = 0 for |g⟩, 1 for |e⟩
//! ```
//!
//! Every matrix built in this crate follows that ordering.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::OperatorError;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which of the two resonators an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cavity {
    First,
    Second,
}

impl Cavity {
    pub fn from_number(p: usize) -> Option<Self> {
        match p {
            1 => Some(Cavity::First),
            2 => Some(Cavity::Second),
            _ => None,
        }
    }

    pub fn number(self) -> usize {
        match self {
            Cavity::First => 1,
            Cavity::Second => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QubitLevel {
    Ground,
    Excited,
}

impl QubitLevel {
    pub fn index(self) -> usize {
        match self {
            QubitLevel::Ground => 0,
            QubitLevel::Excited => 1,
        }
    }

    pub fn from_index(s: usize) -> Option<Self> {
        match s {
            0 => Some(QubitLevel::Ground),
            1 => Some(QubitLevel::Excited),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            QubitLevel::Ground => 'g',
            QubitLevel::Excited => 'e',
        }
    }
}

/// A product-basis label `|n, m, s⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub n: usize,
    pub m: usize,
    pub qubit: QubitLevel,
}

impl BasisLabel {
    pub const fn new(n: usize, m: usize, qubit: QubitLevel) -> Self {
        Self { n, m, qubit }
    }

    /// Short name such as `P_11e` used for population series.
    pub fn population_name(&self) -> String {
        format!("P_{}{}{}", self.n, self.m, self.qubit.symbol())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}⟩", self.n, self.m, self.qubit.symbol())
    }
}

/// Shape of the truncated composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceLayout {
    cutoffs: [usize; 2],
}

impl SpaceLayout {
    pub const QUBIT_DIM: usize = 2;

    /// `n1`, `n2` are the largest Fock indices kept in each cavity.
    pub const fn new(n1: usize, n2: usize) -> Self {
        Self { cutoffs: [n1, n2] }
    }

    pub const fn symmetric(cutoff: usize) -> Self {
        Self::new(cutoff, cutoff)
    }

    pub fn cutoff(&self, cavity: Cavity) -> usize {
        match cavity {
            Cavity::First => self.cutoffs[0],
            Cavity::Second => self.cutoffs[1],
        }
    }

    pub fn fock_dim(&self, cavity: Cavity) -> usize {
        self.cutoff(cavity) + 1
    }

    pub fn dim(&self) -> usize {
        self.fock_dim(Cavity::First) * self.fock_dim(Cavity::Second) * Self::QUBIT_DIM
    }

    pub fn index(&self, n: usize, m: usize, s: QubitLevel) -> Result<usize, OperatorError> {
        if n > self.cutoffs[0] {
            return Err(OperatorError::IndexOutOfRange { component: "n (cavity 1)", value: n, max: self.cutoffs[0] });
        }
        if m > self.cutoffs[1] {
            return Err(OperatorError::IndexOutOfRange { component: "m (cavity 2)", value: m, max: self.cutoffs[1] });
        }
        Ok(self.index_unchecked(n, m, s))
    }

    pub fn label_index(&self, label: BasisLabel) -> Result<usize, OperatorError> {
        self.index(label.n, label.m, label.qubit)
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, n: usize, m: usize, s: QubitLevel) -> usize {
        (n * (self.cutoffs[1] + 1) + m) * Self::QUBIT_DIM + s.index()
    }

    pub fn label(&self, index: usize) -> Result<BasisLabel, OperatorError> {
        let dim = self.dim();
        if index >= dim {
            return Err(OperatorError::IndexOutOfRange { component: "flat index", value: index, max: dim - 1 });
        }
        let s = index % Self::QUBIT_DIM;
        let rest = index / Self::QUBIT_DIM;
        let m = rest % (self.cutoffs[1] + 1);
        let n = rest / (self.cutoffs[1] + 1);
        Ok(BasisLabel::new(n, m, QubitLevel::from_index(s).expect("s < 2")))
    }

    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dim()).map(move |k| self.label(k).expect("in range"))
    }
}

/// Dense operator on the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumOperator {
    layout: SpaceLayout,
    matrix: CMatrix,
}

impl QuantumOperator {
    pub fn new(layout: SpaceLayout, matrix: CMatrix) -> Result<Self, OperatorError> {
        let dim = layout.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(OperatorError::DimensionMismatch { expected: dim, rows: matrix.nrows(), cols: matrix.ncols() });
        }
        Ok(Self { layout, matrix })
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let d = layout.dim();
        Self { layout, matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.dim();
        Self { layout, matrix: CMatrix::identity(d, d) }
    }

    /// Tensor product of per-factor matrices in layout order.
    pub fn from_factors(
        layout: SpaceLayout,
        cavity1: &CMatrix,
        cavity2: &CMatrix,
        qubit: &CMatrix,
    ) -> Result<Self, OperatorError> {
        let dims = [
            (cavity1, layout.fock_dim(Cavity::First)),
            (cavity2, layout.fock_dim(Cavity::Second)),
            (qubit, SpaceLayout::QUBIT_DIM),
        ];
        for (m, d) in dims {
            if m.nrows() != d || m.ncols() != d {
                return Err(OperatorError::DimensionMismatch { expected: d, rows: m.nrows(), cols: m.ncols() });
            }
        }
        Self::new(layout, cavity1.kronecker(cavity2).kronecker(qubit))
    }

    /// Embeds a single-mode matrix on `cavity`, identity elsewhere.
    pub fn on_cavity(layout: SpaceLayout, cavity: Cavity, block: &CMatrix) -> Result<Self, OperatorError> {
        let id1 = CMatrix::identity(layout.fock_dim(Cavity::First), layout.fock_dim(Cavity::First));
        let id2 = CMatrix::identity(layout.fock_dim(Cavity::Second), layout.fock_dim(Cavity::Second));
        let idq = CMatrix::identity(2, 2);
        match cavity {
            Cavity::First => Self::from_factors(layout, block, &id2, &idq),
            Cavity::Second => Self::from_factors(layout, &id1, block, &idq),
        }
    }

    pub fn on_qubit(layout: SpaceLayout, block: &CMatrix) -> Result<Self, OperatorError> {
        let id1 = CMatrix::identity(layout.fock_dim(Cavity::First), layout.fock_dim(Cavity::First));
        let id2 = CMatrix::identity(layout.fock_dim(Cavity::Second), layout.fock_dim(Cavity::Second));
        Self::from_factors(layout, &id1, &id2, block)
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn element(&self, row: BasisLabel, col: BasisLabel) -> Result<Complex64, OperatorError> {
        Ok(self.matrix[(self.layout.label_index(row)?, self.layout.label_index(col)?)])
    }

    pub fn dagger(&self) -> Self {
        Self { layout: self.layout, matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { layout: self.layout, matrix: &self.matrix * c }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `max |M - M†|`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    /// `max |M†M - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        max_abs_diff(&(self.matrix.adjoint() * &self.matrix), &CMatrix::identity(d, d))
    }

    /// Tr(M ρ) for a matrix on the same space.
    pub fn expectation(&self, rho: &CMatrix) -> Complex64 {
        trace_product(&self.matrix, rho)
    }
}

fn check_same_layout(a: &QuantumOperator, b: &QuantumOperator) {
    assert_eq!(a.layout, b.layout, "operators live on different layouts");
}

impl Mul<&QuantumOperator> for &QuantumOperator {
    type Output = QuantumOperator;
    fn mul(self, rhs: &QuantumOperator) -> QuantumOperator {
        check_same_layout(self, rhs);
        QuantumOperator { layout: self.layout, matrix: &self.matrix * &rhs.matrix }
    }
}

impl Add<&QuantumOperator> for &QuantumOperator {
    type Output = QuantumOperator;
    fn add(self, rhs: &QuantumOperator) -> QuantumOperator {
        check_same_layout(self, rhs);
        QuantumOperator { layout: self.layout, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub<&QuantumOperator> for &QuantumOperator {
    type Output = QuantumOperator;
    fn sub(self, rhs: &QuantumOperator) -> QuantumOperator {
        check_same_layout(self, rhs);
        QuantumOperator { layout: self.layout, matrix: &self.matrix - &rhs.matrix }
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Tr(A B) without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Single-mode annihilation operator on `dim` Fock states.
pub fn annihilation_block(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `(a, a†)` for the chosen cavity, embedded on the composite space.
///
/// `a†` is the adjoint of the truncated `a`, so `[a, a†] = I` fails only on
/// the highest Fock level of that cavity.
pub fn ladder_ops(layout: SpaceLayout, cavity: Cavity) -> (QuantumOperator, QuantumOperator) {
    let a = annihilation_block(layout.fock_dim(cavity));
    let a = QuantumOperator::on_cavity(layout, cavity, &a).expect("block sized from layout");
    let ad = a.dagger();
    (a, ad)
}

/// Qubit operators embedded on the composite space.
#[derive(Clone, Debug)]
pub struct QubitOps {
    pub sigma_z: QuantumOperator,
    pub sigma_plus: QuantumOperator,
    pub sigma_minus: QuantumOperator,
    /// `(σ+ − σ− − σz) / 2`
    pub exp_i_phi: QuantumOperator,
}

pub(crate) fn sigma_z_block() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-ONE, ONE]))
}

pub(crate) fn sigma_plus_block() -> CMatrix {
    // |e⟩⟨g|, with g = 0 and e = 1
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 0)] = ONE;
    m
}

pub(crate) fn sigma_minus_block() -> CMatrix {
    sigma_plus_block().transpose()
}

pub fn qubit_ops(layout: SpaceLayout) -> QubitOps {
    let sz = sigma_z_block();
    let sp = sigma_plus_block();
    let sm = sigma_minus_block();
    let phi = (&sp - &sm - &sz) * Complex64::new(0.5, 0.0);
    let embed = |b: &CMatrix| QuantumOperator::on_qubit(layout, b).expect("2x2 qubit block");
    QubitOps { sigma_z: embed(&sz), sigma_plus: embed(&sp), sigma_minus: embed(&sm), exp_i_phi: embed(&phi) }
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by the upward
/// three-term recurrence in `n`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64, OperatorError> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(OperatorError::InvalidArgument(format!(
            "laguerre superscript must be a finite value >= 0, got {alpha}"
        )));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(OperatorError::InvalidArgument(format!("laguerre argument must be finite and >= 0, got {x}")));
    }
    Ok(laguerre_unchecked(n, alpha, x))
}

pub(crate) fn laguerre_unchecked(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sqrt(n! / (n+l)!)` as a running product.
fn factorial_ratio_sqrt(n: usize, l: usize) -> f64 {
    (n + 1..=n + l).fold(1.0, |acc, k| acc / (k as f64).sqrt())
}

/// Frank–Condon factor `β_n^{n+l}(λ) = sqrt(n!/(n+l)!) (2iλ)^l e^{-2λ²} L_n^{(l)}(4λ²)`.
pub fn frank_condon(n: usize, l: usize, lambda: f64) -> Result<Complex64, OperatorError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(OperatorError::InvalidArgument(format!("coupling must be finite and >= 0, got {lambda}")));
    }
    Ok(frank_condon_unchecked(n, l, lambda))
}

pub(crate) fn frank_condon_unchecked(n: usize, l: usize, lambda: f64) -> Complex64 {
    let x = 4.0 * lambda * lambda;
    let mag = factorial_ratio_sqrt(n, l) * (-2.0 * lambda * lambda).exp() * laguerre_unchecked(n, l as f64, x);
    Complex64::new(0.0, 2.0 * lambda).powu(l as u32) * mag
}

/// `⟨row|D(α)|col⟩` in closed form.
pub fn displacement_element(row: usize, col: usize, alpha: Complex64) -> Complex64 {
    let x = alpha.norm_sqr();
    let (n, l, base) = if row >= col { (col, row - col, alpha) } else { (row, col - row, -alpha.conj()) };
    let mag = factorial_ratio_sqrt(n, l) * (-0.5 * x).exp() * laguerre_unchecked(n, l as f64, x);
    base.powu(l as u32) * mag
}

/// Single-mode `D(α)` on `dim` Fock states, elements taken from the
/// infinite-dimensional operator (no renormalization at the cutoff).
pub fn displacement_block(alpha: Complex64, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| displacement_element(r, c, alpha))
}

pub fn displacement_matrix(
    alpha: Complex64,
    layout: SpaceLayout,
    cavity: Cavity,
) -> Result<QuantumOperator, OperatorError> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(OperatorError::InvalidArgument(format!("displacement amplitude must be finite, got {alpha}")));
    }
    let block = displacement_block(alpha, layout.fock_dim(cavity));
    QuantumOperator::on_cavity(layout, cavity, &block)
}

/// Truncation defect of the single-mode `D(α)`: `max |D†D − I|` over Fock
/// indices `<= keep`, with the block built at `cutoff`.
pub fn displacement_unitarity_defect(alpha: Complex64, cutoff: usize, keep: usize) -> f64 {
    let d = displacement_block(alpha, cutoff + 1);
    let prod = d.adjoint() * &d;
    let keep = keep.min(cutoff);
    let mut worst: f64 = 0.0;
    for r in 0..=keep {
        for c in 0..=keep {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

/// Declared bound on [`displacement_unitarity_defect`]: the largest Fock-tail
/// weight `Σ_{k > cutoff} |⟨k|D(α)|r⟩|²` over columns `r <= keep`, each
/// majorized with `|L_n^{(l)}(x)| <= C(n+l, n) e^{x/2}`.
pub fn displacement_truncation_bound(alpha: Complex64, cutoff: usize, keep: usize) -> f64 {
    let x = alpha.norm_sqr();
    let mut worst: f64 = 0.0;
    for n in 0..=keep.min(cutoff) {
        let l0 = cutoff + 1 - n;
        // term(l) = x^l (n+l)!/n! / (l!)^2
        let mut term = (1..=l0).fold(1.0, |acc, j| acc * x * (n + j) as f64 / (j * j) as f64);
        let mut tail: f64 = 0.0;
        let mut l = l0;
        while term > 1e-18 * tail && l < l0 + 500 || tail == 0.0 && term > 0.0 {
            tail += term;
            l += 1;
            term *= x * (n + l) as f64 / (l * l) as f64;
        }
        worst = worst.max(tail);
    }
    worst
}

/// `exp(α a† − α* a)` of the truncated generator, by Padé approximation.
/// Used as an independent reference for the closed form.
pub fn displacement_by_expm(alpha: Complex64, dim: usize) -> CMatrix {
    let a = annihilation_block(dim);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    gen.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_basis_element_is_zero() {
        let l = SpaceLayout::symmetric(4);
        assert_eq!(l.index(0, 0, QubitLevel::Ground).unwrap(), 0);
        assert_eq!(l.dim(), 50);
    }

    #[test]
    fn index_roundtrip_for_all_indices() {
        let l = SpaceLayout::new(3, 5);
        for k in 0..l.dim() {
            let lab = l.label(k).unwrap();
            assert_eq!(l.label_index(lab).unwrap(), k);
        }
        assert!(l.label(l.dim()).is_err());
    }

    #[test]
    fn out_of_range_component_is_named() {
        let l = SpaceLayout::new(2, 3);
        let err = l.index(0, 4, QubitLevel::Excited).unwrap_err();
        assert!(err.to_string().contains("cavity 2"), "{err}");
        let err = l.index(3, 0, QubitLevel::Ground).unwrap_err();
        assert!(err.to_string().contains("cavity 1"), "{err}");
    }

    #[test]
    fn ladder_elements() {
        let l = SpaceLayout::symmetric(3);
        let (a, ad) = ladder_ops(l, Cavity::First);
        let g = QubitLevel::Ground;
        assert_abs_diff_eq!(a.element(BasisLabel::new(0, 0, g), BasisLabel::new(1, 0, g)).unwrap().re, 1.0);
        assert_abs_diff_eq!(
            ad.element(BasisLabel::new(2, 0, g), BasisLabel::new(1, 0, g)).unwrap().re,
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let l = SpaceLayout::new(4, 3);
        for cav in [Cavity::First, Cavity::Second] {
            let (a, ad) = ladder_ops(l, cav);
            let comm = a.commutator(&ad);
            for k in 0..l.dim() {
                let lab = l.label(k).unwrap();
                let top = match cav {
                    Cavity::First => lab.n == l.cutoff(cav),
                    Cavity::Second => lab.m == l.cutoff(cav),
                };
                let expected = if top { -(l.cutoff(cav) as f64) } else { 1.0 };
                assert_abs_diff_eq!(comm.matrix()[(k, k)].re, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cavity_operators_commute_exactly() {
        let l = SpaceLayout::new(3, 4);
        let (a1, _) = ladder_ops(l, Cavity::First);
        let (a2, _) = ladder_ops(l, Cavity::Second);
        let comm = a1.commutator(&a2);
        assert!(comm.matrix().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn pauli_relations() {
        let l = SpaceLayout::symmetric(1);
        let q = qubit_ops(l);
        let g = l.index(0, 0, QubitLevel::Ground).unwrap();
        let e = l.index(0, 0, QubitLevel::Excited).unwrap();
        assert_eq!(q.sigma_z.matrix()[(g, g)], -ONE);
        assert_eq!(q.sigma_plus.matrix()[(e, g)], ONE);
        let anti = &(&q.sigma_plus * &q.sigma_minus) + &(&q.sigma_minus * &q.sigma_plus);
        assert_eq!(anti, QuantumOperator::identity(l));
        // (σ+ − σ− − σz)|g⟩/2 = (|e⟩ + |g⟩)/2
        let col = q.exp_i_phi.matrix().column(g);
        assert_abs_diff_eq!(col[g].re, 0.5);
        assert_abs_diff_eq!(col[e].re, 0.5);
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 1.0, 0.16).unwrap(), 1.0);
        // series L_1^(α)(x) = 1 + α − x
        assert_abs_diff_eq!(laguerre(1, 1.0, 0.16).unwrap(), 1.84, epsilon = 1e-15);
        // L_n^(α)(0) = C(n+α, n)
        assert_abs_diff_eq!(laguerre(2, 1.0, 0.0).unwrap(), 3.0, epsilon = 1e-15);
        assert!(laguerre(2, -1.0, 0.3).is_err());
        assert!(laguerre(2, 1.0, -0.3).is_err());
    }

    /// Explicit series L_n^(α)(x) = Σ_k (−1)^k C(n+α, n−k) x^k / k! for integer α.
    fn laguerre_series(n: usize, alpha: usize, x: f64) -> f64 {
        fn binom(a: usize, b: usize) -> f64 {
            (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
        }
        (0..=n)
            .map(|k| {
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                (-1f64).powi(k as i32) * binom(n + alpha, n - k) * x.powi(k as i32) / fact
            })
            .sum()
    }

    #[test]
    fn laguerre_matches_series() {
        for n in 0..12 {
            for alpha in 0..5 {
                for &x in &[0.0, 0.16, 0.64, 1.5, 4.0] {
                    let a = laguerre(n, alpha as f64, x).unwrap();
                    let b = laguerre_series(n, alpha, x);
                    assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "n={n} α={alpha} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn frank_condon_examples() {
        let e = (-0.08f64).exp();
        let b00 = frank_condon(0, 0, 0.2).unwrap();
        assert_abs_diff_eq!(b00.re, e, epsilon = 1e-15);
        assert_abs_diff_eq!(b00.re, 0.923_116_3, epsilon = 1e-7);
        let b01 = frank_condon(0, 1, 0.2).unwrap();
        assert_abs_diff_eq!(b01.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b01.im, 0.4 * e, epsilon = 1e-15);
        assert_abs_diff_eq!(b01.im, 0.369_246_5, epsilon = 1e-7);
        for n in 0..6 {
            for l in 0..4 {
                let v = frank_condon(n, l, 0.0).unwrap();
                let expected = if l == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v.re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
            }
        }
        assert!(frank_condon(0, 1, -0.1).is_err());
    }

    #[test]
    fn frank_condon_no_overflow_at_large_n() {
        let v = frank_condon(170, 30, 0.2).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
    }

    #[test]
    fn displacement_examples() {
        let l = SpaceLayout::symmetric(4);
        let d0 = displacement_matrix(ZERO, l, Cavity::Second).unwrap();
        assert!(max_abs_diff(d0.matrix(), QuantumOperator::identity(l).matrix()) < 1e-15);
        let vac = displacement_element(0, 0, c(0.0, 0.4));
        assert_abs_diff_eq!(vac.re, (-0.08f64).exp(), epsilon = 1e-15);
        assert!(displacement_matrix(c(f64::NAN, 0.0), l, Cavity::First).is_err());
    }

    #[test]
    fn displacement_matches_matrix_exponential() {
        // expm at a much larger truncation, compared on the leading block
        for &alpha in &[c(0.5, 0.0), c(0.0, 0.4), c(-0.3, 0.35), c(0.1, -0.2)] {
            let closed = displacement_block(alpha, 31);
            let reference = displacement_by_expm(alpha, 81);
            let dist: f64 = (0..31)
                .flat_map(|r| (0..31).map(move |c| (r, c)))
                .map(|(r, c)| (closed[(r, c)] - reference[(r, c)]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(dist < 1e-8, "alpha={alpha}: {dist}");
        }
    }

    #[test]
    fn frank_condon_is_a_displacement_element() {
        for &lambda in &[0.05, 0.2, 0.35] {
            let d = displacement_block(c(0.0, 2.0 * lambda), 12);
            for n in 0..12 {
                for l in 0..12 - n {
                    let fc = frank_condon(n, l, lambda).unwrap();
                    assert!((fc - d[(n + l, n)]).norm() < 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_holds(n in 1usize..20, alpha in 0.0f64..5.0, x in 0.0f64..10.0) {
            let lm = laguerre(n - 1, alpha, x).unwrap();
            let l0 = laguerre(n, alpha, x).unwrap();
            let lp = laguerre(n + 1, alpha, x).unwrap();
            let nf = n as f64;
            let lhs = (nf + 1.0) * lp;
            let rhs = (2.0 * nf + 1.0 + alpha - x) * l0 - (nf + alpha) * lm;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() / scale < 1e-12);
        }

        #[test]
        fn truncated_displacement_is_unitary_away_from_cutoff(
            re in -0.35f64..0.35, im in -0.35f64..0.35, cutoff in 20usize..32
        ) {
            let defect = displacement_unitarity_defect(c(re, im), cutoff, cutoff - 5);
            let bound = displacement_truncation_bound(c(re, im), cutoff, cutoff - 5);
            prop_assert!(defect <= bound + 1e-13, "defect {} bound {}", defect, bound);
            // far from the boundary the truncation is invisible
            prop_assert!(displacement_unitarity_defect(c(re, im), cutoff, 5) < 1e-12);
        }

        #[test]
        fn basis_label_roundtrip(n1 in 0usize..7, n2 in 0usize..7, k in 0usize..1000) {
            let l = SpaceLayout::new(n1, n2);
            let k = k % l.dim();
            let lab = l.label(k).unwrap();
            prop_assert_eq!(l.label_index(lab).unwrap(), k);
        }
    }
}
