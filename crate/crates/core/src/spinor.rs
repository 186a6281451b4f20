//! Complex spinors, the Dirac-representation gamma matrices, Pauli matrices,
//! bilinears, the degeneracy direction κ and the probability current.
//!
//! Conventions: metric signature (+, −, −, −); γ⁰ = diag(I, −I) and γ^i has
//! σ^i in the upper-right block and −σ^i in the lower-left block. The
//! chirality-like combination used by the degeneracy condition is
//! γ = γ⁰ + iγ¹γ²γ³.

use std::ops::{Add, Index, Mul, Sub};
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::FourVec;

pub type CScalar = Complex64;

const ZERO: CScalar = CScalar::new(0.0, 0.0);
const ONE: CScalar = CScalar::new(1.0, 0.0);
const I: CScalar = CScalar::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinorError {
    #[error("κ bilinear is undefined: denominator {0} vanishes")]
    ZeroDenominator(CScalar),
}

/// Spin projection sign for Weyl spinors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    #[serde(rename = "+", alias = "positive")]
    Positive,
    #[serde(rename = "-", alias = "negative")]
    Negative,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Positive => 1.0,
            Helicity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Helicity {
        match self {
            Helicity::Positive => Helicity::Negative,
            Helicity::Negative => Helicity::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<const N: usize>(pub [CScalar; N]);

pub type Spinor2 = Spinor<2>;
pub type Spinor4 = Spinor<4>;

impl<const N: usize> Spinor<N> {
    pub fn zero() -> Self {
        Spinor([ZERO; N])
    }

    pub fn from_real(values: [f64; N]) -> Self {
        Spinor(values.map(|v| CScalar::new(v, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product ⟨self, other⟩ = self† other.
    pub fn inner(&self, other: &Self) -> CScalar {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: CScalar) -> Self {
        Spinor(self.0.map(|v| v * c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Spinor(self.0.map(|v| v * c))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

impl<const N: usize> Add for Spinor<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Spinor(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<const N: usize> Sub for Spinor<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Spinor(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<const N: usize> Index<usize> for Spinor<N> {
    type Output = CScalar;
    fn index(&self, i: usize) -> &CScalar {
        &self.0[i]
    }
}

impl Spinor4 {
    /// Stacks two 2-spinors into (upper, lower).
    pub fn from_blocks(upper: Spinor2, lower: Spinor2) -> Self {
        Spinor([upper.0[0], upper.0[1], lower.0[0], lower.0[1]])
    }

    pub fn upper(&self) -> Spinor2 {
        Spinor([self.0[0], self.0[1]])
    }

    pub fn lower(&self) -> Spinor2 {
        Spinor([self.0[2], self.0[3]])
    }
}

/// Square complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[CScalar; N]; N]);

pub type Mat2 = CMatrix<2>;
pub type Mat4 = CMatrix<4>;

impl<const N: usize> CMatrix<N> {
    pub fn zero() -> Self {
        CMatrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn scale(&self, c: CScalar) -> Self {
        CMatrix(self.0.map(|row| row.map(|v| v * c)))
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i].conj())))
    }

    pub fn transpose(&self) -> Self {
        CMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn apply(&self, v: &Spinor<N>) -> Spinor<N> {
        Spinor(std::array::from_fn(|i| {
            (0..N).map(|j| self.0[i][j] * v.0[j]).sum()
        }))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |m, c| m.max(c.norm()))
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        CMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])))
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])))
    }
}

impl Mat4 {
    /// Assembles a 4×4 matrix from 2×2 blocks [[a, b], [c, d]].
    pub fn from_blocks(a: Mat2, b: Mat2, c: Mat2, d: Mat2) -> Self {
        let mut m = Mat4::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i][j + 2] = b.0[i][j];
                m.0[i + 2][j] = c.0[i][j];
                m.0[i + 2][j + 2] = d.0[i][j];
            }
        }
        m
    }
}

/// σ⁰ = I, σ¹, σ², σ³.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSet {
    pub sigma: [Mat2; 4],
}

/// γ⁰..γ³ in the Dirac representation and γ = γ⁰ + iγ¹γ²γ³.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
    pub chiral: Mat4,
}

static PAULI: LazyLock<PauliSet> = LazyLock::new(|| {
    let s1 = CMatrix([[ZERO, ONE], [ONE, ZERO]]);
    let s2 = CMatrix([[ZERO, -I], [I, ZERO]]);
    let s3 = CMatrix([[ONE, ZERO], [ZERO, -ONE]]);
    PauliSet {
        sigma: [Mat2::identity(), s1, s2, s3],
    }
});

static GAMMA: LazyLock<GammaSet> = LazyLock::new(|| {
    let p = pauli_set();
    let id = Mat2::identity();
    let z = Mat2::zero();
    let g0 = Mat4::from_blocks(id, z, z, id.scale(-ONE));
    let gi = |s: Mat2| Mat4::from_blocks(z, s, s.scale(-ONE), z);
    let gamma = [g0, gi(p.sigma[1]), gi(p.sigma[2]), gi(p.sigma[3])];
    let chiral = g0 + (gamma[1] * gamma[2] * gamma[3]).scale(I);
    GammaSet { gamma, chiral }
});

pub fn pauli_set() -> &'static PauliSet {
    &PAULI
}

pub fn gamma_set() -> &'static GammaSet {
    &GAMMA
}

/// Matrices multiplying (∂_μ, b_μ) in the Weyl equation of the given
/// helicity: (σ⁰, σ¹, σ², σ³) for positive helicity, (−σ⁰, σ¹, σ², σ³) for
/// negative helicity.
pub fn weyl_matrices(helicity: Helicity) -> [Mat2; 4] {
    let mut m = pauli_set().sigma;
    if helicity == Helicity::Negative {
        m[0] = m[0].scale(-ONE);
    }
    m
}

/// Ψ†MΨ.
pub fn bilinear<const N: usize>(psi: &Spinor<N>, m: &CMatrix<N>) -> CScalar {
    psi.inner(&m.apply(psi))
}

/// ΨᵀMΨ (no conjugation).
pub fn transpose_bilinear<const N: usize>(psi: &Spinor<N>, m: &CMatrix<N>) -> CScalar {
    let mp = m.apply(psi);
    psi.0.iter().zip(mp.0.iter()).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyFlags {
    /// Ψ†γΨ
    pub dag_gamma: CScalar,
    /// Ψᵀγ²Ψ
    pub t_gamma2: CScalar,
    pub is_degenerate: bool,
}

/// Degeneracy test Ψ†γΨ = 0 and Ψᵀγ²Ψ ≠ 0, with tolerance 1e−10·‖Ψ‖².
pub fn degeneracy_flags(psi: &Spinor4) -> DegeneracyFlags {
    let g = gamma_set();
    let dag_gamma = bilinear(psi, &g.chiral);
    let t_gamma2 = transpose_bilinear(psi, &g.gamma[2]);
    let tol = 1e-10 * psi.norm_sqr();
    DegeneracyFlags {
        dag_gamma,
        t_gamma2,
        is_degenerate: dag_gamma.norm() <= tol && t_gamma2.norm() > tol,
    }
}

/// Closed-form degeneracy direction (1, −sinθcosφ, −sinθsinφ, −cosθ).
pub fn kappa_of(theta: f64, phi: f64) -> FourVec<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    FourVec::new(1.0, -st * cp, -st * sp, -ct)
}

/// κ from transpose bilinears of a degenerate Dirac spinor:
/// (1, −Ψᵀγ⁰γ¹γ²Ψ/D, −Ψᵀγ⁰Ψ/D, Ψᵀγ⁰γ²γ³Ψ/D) with D = Ψᵀγ²Ψ.
pub fn kappa_from_dirac(psi: &Spinor4) -> Result<FourVec<f64>, SpinorError> {
    let g = &gamma_set().gamma;
    let den = transpose_bilinear(psi, &g[2]);
    if den.norm() <= 1e-10 * psi.norm_sqr() {
        return Err(SpinorError::ZeroDenominator(den));
    }
    let k1 = -transpose_bilinear(psi, &(g[0] * g[1] * g[2])) / den;
    let k2 = -transpose_bilinear(psi, &g[0]) / den;
    let k3 = transpose_bilinear(psi, &(g[0] * g[2] * g[3])) / den;
    Ok(FourVec::new(1.0, k1.re, k2.re, k3.re))
}

/// κ from Hermitian bilinears of a Weyl spinor: (1, ∓ψ†σψ/ψ†ψ), upper sign
/// for positive helicity.
pub fn kappa_from_weyl(psi: &Spinor2, helicity: Helicity) -> Result<FourVec<f64>, SpinorError> {
    let norm = psi.norm_sqr();
    if norm == 0.0 {
        return Err(SpinorError::ZeroDenominator(ZERO));
    }
    let s = &pauli_set().sigma;
    let sign = -helicity.sign();
    let k = |i: usize| sign * bilinear(psi, &s[i]).re / norm;
    Ok(FourVec::new(1.0, k(1), k(2), k(3)))
}

/// κ_μγ^μΨ. Vanishes for degenerate spinors with the matching κ.
pub fn null_contraction(kappa: &FourVec<f64>, psi: &Spinor4) -> Spinor4 {
    let g = &gamma_set().gamma;
    (0..4).fold(Spinor4::zero(), |acc, mu| {
        acc + g[mu].apply(psi).scale_real(kappa[mu])
    })
}

/// κ_μσ^μψ with the sign pattern of the Weyl equation of the given helicity.
pub fn weyl_null_contraction(kappa: &FourVec<f64>, psi: &Spinor2, helicity: Helicity) -> Spinor2 {
    let m = weyl_matrices(helicity);
    (0..4).fold(Spinor2::zero(), |acc, mu| {
        acc + m[mu].apply(psi).scale_real(kappa[mu])
    })
}

/// j^μ = (Ψ†Ψ, Ψ†γ⁰γ¹Ψ, Ψ†γ⁰γ²Ψ, Ψ†γ⁰γ³Ψ).
pub fn probability_current(psi: &Spinor4) -> FourVec<f64> {
    let g = &gamma_set().gamma;
    FourVec::new(
        psi.norm_sqr(),
        bilinear(psi, &(g[0] * g[1])).re,
        bilinear(psi, &(g[0] * g[2])).re,
        bilinear(psi, &(g[0] * g[3])).re,
    )
}

/// Weyl current (ψ†ψ, ±ψ†σψ), upper sign for positive helicity.
pub fn weyl_current(psi: &Spinor2, helicity: Helicity) -> FourVec<f64> {
    let s = &pauli_set().sigma;
    let sign = helicity.sign();
    FourVec::new(
        psi.norm_sqr(),
        sign * bilinear(psi, &s[1]).re,
        sign * bilinear(psi, &s[2]).re,
        sign * bilinear(psi, &s[3]).re,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> CScalar {
        CScalar::new(re, im)
    }

    #[test]
    fn gamma_zero_squares_to_identity_and_anticommutes() {
        let g = &gamma_set().gamma;
        assert_eq!(g[0] * g[0], Mat4::identity());
        assert_eq!(g[0] * g[1] + g[1] * g[0], Mat4::zero());
    }

    #[test]
    fn chiral_combination_blocks() {
        // Hand-multiplied: iγ¹γ²γ³ = [[0, I], [−I, 0]], so γ = [[I, I], [−I, −I]].
        let id = Mat2::identity();
        let expected = Mat4::from_blocks(id, id, id.scale(-ONE), id.scale(-ONE));
        assert_eq!(gamma_set().chiral, expected);
    }

    #[test]
    fn pauli_products() {
        let s = &pauli_set().sigma;
        assert_eq!(s[1] * s[2], s[3].scale(I));
        assert_eq!(s[3] * s[3], Mat2::identity());
        assert_eq!(s[0], Mat2::identity());
    }

    #[test]
    fn bilinear_examples() {
        let g = gamma_set();
        let psi = Spinor4::from_real([1.0, 0.0, 1.0, 0.0]);
        assert_eq!(bilinear(&psi, &g.chiral), ZERO);
        let r = (0.5f64 / 1.5).sqrt();
        let massive = Spinor4::from_real([1.0, 0.0, r, 0.0]);
        assert!((bilinear(&massive, &g.chiral) - c(2.0 * 0.5 / 1.5, 0.0)).norm() < 1e-15);
        let e0 = Spinor4::from_real([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(bilinear(&e0, &Mat4::identity()), ONE);
    }

    #[test]
    fn transpose_bilinear_examples() {
        let g = gamma_set();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = Spinor4::from_real([h, h, h, -h]);
        assert!((transpose_bilinear(&psi, &g.gamma[2]) - c(0.0, 2.0)).norm() < 1e-15);
        let single = Spinor4::from_real([1.0, 0.0, 1.0, 0.0]);
        assert_eq!(transpose_bilinear(&single, &g.gamma[2]), ZERO);
        assert_eq!(transpose_bilinear(&Spinor4::zero(), &g.gamma[2]), ZERO);
    }

    #[test]
    fn degeneracy_of_weyl_reducible_spinor() {
        let flags = degeneracy_flags(&Spinor4::from_real([1.0, 0.0, 1.0, 0.0]));
        assert_eq!(flags.dag_gamma, ZERO);
        assert_eq!(flags.t_gamma2, ZERO);
        assert!(!flags.is_degenerate);
    }

    #[test]
    fn kappa_closed_form_examples() {
        let k = kappa_of(0.0, 0.0);
        assert_eq!(k, FourVec::new(1.0, -0.0, -0.0, -1.0));
        let h = std::f64::consts::FRAC_PI_2;
        let k = kappa_of(h, h);
        assert!(k.max_abs_diff(&FourVec::new(1.0, 0.0, -1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn null_contraction_examples() {
        let psi = Spinor4::from_real([1.0, 0.0, 1.0, 0.0]);
        let zero = null_contraction(&FourVec::new(1.0, 0.0, 0.0, -1.0), &psi);
        assert_eq!(zero, Spinor4::zero());
        let flipped = null_contraction(&FourVec::new(1.0, 0.0, 0.0, 1.0), &psi);
        assert!(flipped.norm() > 1.0);
    }

    #[test]
    fn current_examples() {
        let psi = Spinor4::from_real([1.0, 0.0, 1.0, 0.0]);
        assert_eq!(probability_current(&psi), FourVec::new(2.0, 0.0, 0.0, 2.0));
        let scaled = psi.scale_real(0.3);
        let j = probability_current(&scaled);
        assert!(j.max_abs_diff(&FourVec::new(0.18, 0.0, 0.0, 0.18)) < 1e-15);
        assert_eq!(probability_current(&Spinor4::zero()), FourVec::default());
    }

    #[test]
    fn zero_spinor_kappa_is_an_error() {
        assert!(kappa_from_dirac(&Spinor4::zero()).is_err());
        assert!(kappa_from_weyl(&Spinor2::zero(), Helicity::Positive).is_err());
    }
}
