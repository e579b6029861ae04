//! Finite direct sums of matrix blocks with a weighted trace
//! `τ(x) = Σ μᵢ tr(xᵢ)`, and the operator inequalities checked on them.

pub mod cmatrix;
pub mod eigen;
pub mod format;
pub mod random;

use num_complex::Complex64;
use thiserror::Error;

pub use cmatrix::CMatrix;
pub use eigen::{eigh, Eigen};

use crate::numeric::{csum, xlogx};
use crate::spectral::{Atom, SpectralDensity, SpectralError};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_CLAMP: f64 = 1e-10;
pub const NORM_SLACK: f64 = 1e-10;
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off})")]
    EigenNotConverged { sweeps: usize, off: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("element is not Hermitian (defect {0})")]
    NotHermitian(f64),
    #[error("element is not positive semidefinite (eigenvalue {0})")]
    NotPositive(f64),
    #[error("element is not a contraction (norm {0})")]
    NotContraction(f64),
    #[error("contraction is not normal (‖zz* − z*z‖ = {0}); Φ is then not unital")]
    NotNormal(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl MatrixError {
    pub fn code(&self) -> &'static str {
        match self {
            MatrixError::EigenNotConverged { .. } => "eigen_not_converged",
            MatrixError::Shape(_) => "shape",
            MatrixError::NotHermitian(_) => "not_hermitian",
            MatrixError::NotPositive(_) => "not_positive",
            MatrixError::NotContraction(_) => "not_contraction",
            MatrixError::NotNormal(_) => "non_normal_contraction",
            MatrixError::Precondition(_) => "precondition",
            MatrixError::InvalidAlgebra(_) => "invalid_algebra",
            MatrixError::Parse { .. } => "parse",
            MatrixError::Spectral(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMatrixAlgebra {
    blocks: Vec<Block>,
}

impl WeightedMatrixAlgebra {
    pub fn new(blocks: Vec<Block>) -> Result<Self, MatrixError> {
        if blocks.is_empty() {
            return Err(MatrixError::InvalidAlgebra("no blocks".into()));
        }
        for b in &blocks {
            if b.dim == 0 {
                return Err(MatrixError::InvalidAlgebra("block dimension must be ≥ 1".into()));
            }
            if !(b.weight > 0.0 && b.weight.is_finite()) {
                return Err(MatrixError::InvalidAlgebra(format!("block weight must be positive, got {}", b.weight)));
            }
        }
        Ok(Self { blocks })
    }

    /// A single `n × n` block of weight `μ`.
    pub fn full(dim: usize, weight: f64) -> Result<Self, MatrixError> {
        Self::new(vec![Block { dim, weight }])
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `τ(𝟙) = Σ μᵢ dᵢ`.
    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    pub fn identity(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| CMatrix::identity(b.dim)).collect(),
        }
    }

    pub fn zero(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| CMatrix::zeros(b.dim)).collect(),
        }
    }

    pub fn check(&self, x: &Element) -> Result<(), MatrixError> {
        if x.blocks.len() != self.blocks.len() {
            return Err(MatrixError::Shape(format!(
                "{} blocks given, algebra has {}",
                x.blocks.len(),
                self.blocks.len()
            )));
        }
        for (i, (m, b)) in x.blocks.iter().zip(&self.blocks).enumerate() {
            if m.dim() != b.dim {
                return Err(MatrixError::Shape(format!("block {i} has size {}, expected {}", m.dim(), b.dim)));
            }
        }
        Ok(())
    }

    /// `τ(x)` (real part).
    pub fn tau(&self, x: &Element) -> f64 {
        csum(x.blocks.iter().zip(&self.blocks).map(|(m, b)| b.weight * m.trace().re))
    }

    pub fn tau_complex(&self, x: &Element) -> Complex64 {
        x.blocks
            .iter()
            .zip(&self.blocks)
            .map(|(m, b)| m.trace() * b.weight)
            .sum()
    }
}

/// An element of the algebra, one matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub blocks: Vec<CMatrix>,
}

impl Element {
    pub fn new(blocks: Vec<CMatrix>) -> Self {
        Self { blocks }
    }

    fn zip<F: Fn(&CMatrix, &CMatrix) -> CMatrix>(&self, other: &Element, f: F) -> Element {
        assert_eq!(self.blocks.len(), other.blocks.len(), "block count mismatch");
        Element {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Element) -> Element {
        self.zip(other, |a, b| a * b)
    }

    pub fn adjoint(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(CMatrix::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Element {
        Element {
            blocks: self.blocks.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Element {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(CMatrix::max_abs).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(CMatrix::hermitian_defect).fold(0.0, f64::max)
    }

    /// Operator norm, the largest block norm.
    pub fn operator_norm(&self) -> Result<f64, MatrixError> {
        let mut worst: f64 = 0.0;
        for m in &self.blocks {
            let e = eigh(&(&m.adjoint() * m))?;
            worst = worst.max(e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt());
        }
        Ok(worst)
    }
}

/// Hermitian element with its per-block eigendecompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianElement {
    element: Element,
    eigen: Vec<Eigen>,
}

impl HermitianElement {
    pub fn new(alg: &WeightedMatrixAlgebra, element: Element) -> Result<Self, MatrixError> {
        alg.check(&element)?;
        let defect = element.hermitian_defect();
        if defect > HERMITIAN_TOL * element.max_abs().max(1.0) {
            return Err(MatrixError::NotHermitian(defect));
        }
        let element = Element {
            blocks: element.blocks.iter().map(CMatrix::hermitian_part).collect(),
        };
        let eigen = element.blocks.iter().map(eigh).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { element, eigen })
    }

    /// Same, also requiring positive semidefiniteness; eigenvalues in
    /// `[−10⁻¹⁰, 0)` are clamped to 0.
    pub fn psd(alg: &WeightedMatrixAlgebra, element: Element) -> Result<Self, MatrixError> {
        let mut h = Self::new(alg, element)?;
        for e in &mut h.eigen {
            for v in &mut e.values {
                if *v < -PSD_CLAMP {
                    return Err(MatrixError::NotPositive(*v));
                }
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        Ok(h)
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn eigen(&self) -> &[Eigen] {
        &self.eigen
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen
            .iter()
            .filter_map(|e| e.values.first().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// `f(h)` by functional calculus.
    pub fn apply<F: Fn(f64) -> f64 + Copy>(&self, f: F) -> Element {
        Element {
            blocks: self.eigen.iter().map(|e| e.apply(f)).collect(),
        }
    }

    /// `τ(f(h)) = Σ μᵢ Σⱼ f(λᵢⱼ)`.
    pub fn tau_of<F: Fn(f64) -> f64>(&self, alg: &WeightedMatrixAlgebra, f: F) -> f64 {
        csum(
            self.eigen
                .iter()
                .zip(alg.blocks())
                .flat_map(|(e, b)| e.values.iter().map(move |&x| (b.weight, x)))
                .map(|(w, x)| w * f(x)),
        )
    }
}

/// Element with `‖z‖ ≤ 1`; normality is computed, never declared.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionElement {
    pub element: Element,
    pub norm: f64,
    pub normal: bool,
    pub normality_defect: f64,
}

impl ContractionElement {
    pub fn new(alg: &WeightedMatrixAlgebra, element: Element) -> Result<Self, MatrixError> {
        alg.check(&element)?;
        let norm = element.operator_norm()?;
        if norm > 1.0 + NORM_SLACK {
            return Err(MatrixError::NotContraction(norm));
        }
        let normality_defect = element
            .blocks
            .iter()
            .map(|m| (&(m * &m.adjoint()) - &(&m.adjoint() * m)).max_abs())
            .fold(0.0, f64::max);
        Ok(Self {
            element,
            norm,
            normal: normality_defect <= 1e-10,
            normality_defect,
        })
    }
}

/// Spectral density of a positive element; equal eigenvalues (within 10⁻⁹)
/// are merged and their weights `μᵢ · multiplicity` added.
pub fn eig_spectral(a: &HermitianElement, alg: &WeightedMatrixAlgebra) -> Result<SpectralDensity, MatrixError> {
    if a.min_eigenvalue() < 0.0 {
        return Err(MatrixError::NotPositive(a.min_eigenvalue()));
    }
    let mut pts: Vec<(f64, f64)> = a
        .eigen
        .iter()
        .zip(alg.blocks())
        .flat_map(|(e, b)| e.values.iter().map(move |&x| (x, b.weight)))
        .collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut groups: Vec<(f64, f64, f64)> = Vec::new(); // (weighted value sum, weight, last value)
    for (x, w) in pts {
        match groups.last_mut() {
            Some(g) if x - g.2 <= MERGE_TOL => {
                g.0 += x * w;
                g.1 += w;
                g.2 = x;
            }
            _ => groups.push((x * w, w, x)),
        }
    }
    let atoms = groups
        .into_iter()
        .map(|(s, w, _)| Atom::new(s / w, w))
        .filter(|a| a.value > 0.0)
        .collect();
    Ok(SpectralDensity::new(atoms, vec![], alg.total_trace())?)
}

/// `τ(a log a)`.
pub fn entropy_matrix(a: &HermitianElement, alg: &WeightedMatrixAlgebra) -> Result<f64, MatrixError> {
    if a.min_eigenvalue() < 0.0 {
        return Err(MatrixError::NotPositive(a.min_eigenvalue()));
    }
    Ok(a.tau_of(alg, xlogx))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiResult {
    pub phi: HermitianElement,
    /// `|τ(Φ(h)) − τ(h)|`.
    pub trace_residual: f64,
    /// `max |Φ(𝟙) − 𝟙|`, computed only for normal `z`.
    pub unital_residual: Option<f64>,
}

/// `Φ(x) = z*xz + (𝟙−zz*)^{1/2} x (𝟙−zz*)^{1/2}`.
pub fn phi_apply(x: &Element, z: &ContractionElement, alg: &WeightedMatrixAlgebra) -> Result<Element, MatrixError> {
    let zz = z.element.mul(&z.element.adjoint());
    let defect = HermitianElement::psd(alg, alg.identity().sub(&zz))?;
    let root = defect.apply(f64::sqrt);
    let first = z.element.adjoint().mul(x).mul(&z.element);
    Ok(first.add(&root.mul(x).mul(&root)))
}

pub fn phi_map(
    h: &HermitianElement,
    z: &ContractionElement,
    alg: &WeightedMatrixAlgebra,
) -> Result<PhiResult, MatrixError> {
    let out = phi_apply(h.element(), z, alg)?;
    let phi = HermitianElement::psd(alg, out)?;
    let trace_residual = (alg.tau(phi.element()) - alg.tau(h.element())).abs();
    let unital_residual = if z.normal {
        Some(phi_apply(&alg.identity(), z, alg)?.sub(&alg.identity()).max_abs())
    } else {
        None
    };
    Ok(PhiResult {
        phi,
        trace_residual,
        unital_residual,
    })
}

/// `(H(h), H(Φ(h)))` for a normal contraction `z`.
pub fn entropy_monotone_under_phi(
    h: &HermitianElement,
    z: &ContractionElement,
    alg: &WeightedMatrixAlgebra,
) -> Result<(f64, f64), MatrixError> {
    if !z.normal {
        return Err(MatrixError::NotNormal(z.normality_defect));
    }
    let r = phi_map(h, z, alg)?;
    Ok((entropy_matrix(h, alg)?, entropy_matrix(&r.phi, alg)?))
}

/// `max |yh − ¼ Σ_k iᵏ (y + iᵏ𝟙) h (y + iᵏ𝟙)*|`.
pub fn polarization_identity_check(y: &Element, h: &Element, alg: &WeightedMatrixAlgebra) -> Result<f64, MatrixError> {
    alg.check(y)?;
    alg.check(h)?;
    let one = alg.identity();
    let mut sum = alg.zero();
    let mut ik = Complex64::new(1.0, 0.0);
    for _ in 0..4 {
        let a = y.add(&one.scale(ik));
        sum = sum.add(&a.mul(h).mul(&a.adjoint()).scale(ik));
        ik *= Complex64::new(0.0, 1.0);
    }
    Ok(y.mul(h).sub(&sum.scale_real(0.25)).max_abs())
}

/// `λ_min(log h₂ − log h₁)` for `𝟙 ≤ h₁ ≤ h₂`.
pub fn log_monotonicity_check(
    h1: &HermitianElement,
    h2: &HermitianElement,
    alg: &WeightedMatrixAlgebra,
) -> Result<f64, MatrixError> {
    if h1.min_eigenvalue() < 1.0 - PSD_CLAMP {
        return Err(MatrixError::Precondition(format!(
            "need h₁ ≥ 𝟙, smallest eigenvalue is {}",
            h1.min_eigenvalue()
        )));
    }
    let gap = HermitianElement::new(alg, h2.element().sub(h1.element()))?;
    if gap.min_eigenvalue() < -PSD_CLAMP {
        return Err(MatrixError::Precondition(format!(
            "need h₁ ≤ h₂, h₂ − h₁ has eigenvalue {}",
            gap.min_eigenvalue()
        )));
    }
    let diff = h2.apply(f64::ln).sub(&h1.apply(f64::ln));
    Ok(HermitianElement::new(alg, diff)?.min_eigenvalue())
}

/// `∫₀^∞ (1/(s+1) − 1/(s+t)) ds` in `u = ln s`; equals `log t`.
pub fn log_integral_representation(t: f64) -> Result<f64, crate::quadrature::QuadratureError> {
    let settings = crate::quadrature::QuadratureSettings {
        abs_tol: 1e-12,
        ..Default::default()
    };
    let f = |u: f64| {
        let s = u.exp();
        s * (t - 1.0) / ((s + 1.0) * (s + t))
    };
    let lo = -60.0 + t.ln().min(0.0);
    let hi = 60.0 + t.ln().max(0.0);
    Ok(crate::quadrature::integrate(f, lo, hi, settings)?.value)
}

/// `max |log(h + ε𝟙) − (log ε)𝟙 − log(h/ε + 𝟙)|` for positive `h`.
pub fn log_shift_identity_residual(
    h: &HermitianElement,
    eps: f64,
    alg: &WeightedMatrixAlgebra,
) -> Result<f64, MatrixError> {
    if h.min_eigenvalue() < 0.0 {
        return Err(MatrixError::NotPositive(h.min_eigenvalue()));
    }
    let lhs = h.apply(|x| (x + eps).ln());
    let rhs = alg.identity().scale_real(eps.ln()).add(&h.apply(|x| (x / eps).ln_1p()));
    Ok(lhs.sub(&rhs).max_abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceChain {
    pub lhs: f64,
    pub middle: f64,
    pub rhs: f64,
}

impl TraceChain {
    pub fn holds(&self) -> bool {
        self.lhs <= self.middle + 1e-9 && self.middle <= self.rhs + 1e-9
    }
}

/// `τ((h₁+𝟙)log(h₁+𝟙)) ≤ τ((h₁+𝟙)^{1/2} log(h₂+𝟙) (h₁+𝟙)^{1/2}) ≤ τ((h₂+𝟙)log(h₂+𝟙))`.
pub fn entropy_trace_monotonicity_check(
    h1: &HermitianElement,
    h2: &HermitianElement,
    alg: &WeightedMatrixAlgebra,
) -> Result<TraceChain, MatrixError> {
    let gap = HermitianElement::new(alg, h2.element().sub(h1.element()))?;
    if gap.min_eigenvalue() < -PSD_CLAMP {
        return Err(MatrixError::Precondition(format!(
            "need h₁ ≤ h₂, h₂ − h₁ has eigenvalue {}",
            gap.min_eigenvalue()
        )));
    }
    let g = |x: f64| xlogx(x + 1.0);
    let lhs = h1.tau_of(alg, g);
    let rhs = h2.tau_of(alg, g);
    let root = h1.apply(|x| (x + 1.0).sqrt());
    let log2 = h2.apply(|x| (x + 1.0).ln());
    let middle = alg.tau(&root.mul(&log2).mul(&root));
    Ok(TraceChain { lhs, middle, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationRow {
    pub block: usize,
    pub index: usize,
    pub theta: f64,
    pub bound: f64,
}

impl DominationRow {
    pub fn holds(&self) -> bool {
        self.theta <= self.bound + 1e-9
    }
}

fn descending(e: &Eigen) -> Vec<f64> {
    e.values.iter().rev().copied().collect()
}

/// Eigenvalues `θ` of `zhz*` against `‖z‖² λ` with `λ` those of `h`, both descending.
pub fn eigenvalue_domination_check(
    h: &HermitianElement,
    z: &Element,
    alg: &WeightedMatrixAlgebra,
) -> Result<Vec<DominationRow>, MatrixError> {
    alg.check(z)?;
    let norm2 = z.operator_norm()?.powi(2);
    let zhz = HermitianElement::new(alg, z.mul(h.element()).mul(&z.adjoint()))?;
    let mut rows = Vec::new();
    for (b, (ez, eh)) in zhz.eigen().iter().zip(h.eigen()).enumerate() {
        for (i, (t, l)) in descending(ez).into_iter().zip(descending(eh)).enumerate() {
            rows.push(DominationRow {
                block: b,
                index: i,
                theta: t,
                bound: norm2 * l,
            });
        }
    }
    Ok(rows)
}

/// For `0 ≤ h₁ ≤ h₂`: eigenvalues of `h₁` against those of `h₂`, descending.
pub fn ordered_pair_domination(
    h1: &HermitianElement,
    h2: &HermitianElement,
    alg: &WeightedMatrixAlgebra,
) -> Result<Vec<DominationRow>, MatrixError> {
    let gap = HermitianElement::new(alg, h2.element().sub(h1.element()))?;
    if gap.min_eigenvalue() < -PSD_CLAMP {
        return Err(MatrixError::Precondition("need h₁ ≤ h₂".into()));
    }
    let mut rows = Vec::new();
    for (b, (e1, e2)) in h1.eigen().iter().zip(h2.eigen()).enumerate() {
        for (i, (t, l)) in descending(e1).into_iter().zip(descending(e2)).enumerate() {
            rows.push(DominationRow {
                block: b,
                index: i,
                theta: t,
                bound: l,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn one_block(n: usize) -> WeightedMatrixAlgebra {
        WeightedMatrixAlgebra::full(n, 1.0).unwrap()
    }

    fn herm(alg: &WeightedMatrixAlgebra, rows: &[&[f64]]) -> HermitianElement {
        HermitianElement::psd(alg, Element::new(vec![CMatrix::from_real_rows(rows)])).unwrap()
    }

    fn contraction(alg: &WeightedMatrixAlgebra, rows: &[&[f64]]) -> ContractionElement {
        ContractionElement::new(alg, Element::new(vec![CMatrix::from_real_rows(rows)])).unwrap()
    }

    #[test]
    fn spectral_bridge() {
        let a = one_block(2);
        let d = eig_spectral(&herm(&a, &[&[2.0, 0.0], &[0.0, 0.5]]), &a).unwrap();
        assert_eq!(d.atoms(), &[Atom::new(0.5, 1.0), Atom::new(2.0, 1.0)]);
        let d = eig_spectral(&herm(&a, &[&[1.5, 0.5], &[0.5, 1.5]]), &a).unwrap();
        assert!((d.atoms()[0].value - 1.0).abs() < 1e-14 && (d.atoms()[1].value - 2.0).abs() < 1e-14);
        let two = WeightedMatrixAlgebra::new(vec![Block { dim: 1, weight: 2.0 }, Block { dim: 1, weight: 3.0 }]).unwrap();
        let x = HermitianElement::psd(&two, Element::new(vec![CMatrix::identity(1), CMatrix::identity(1)])).unwrap();
        assert_eq!(eig_spectral(&x, &two).unwrap().atoms(), &[Atom::new(1.0, 5.0)]);
    }

    #[test]
    fn matrix_entropy() {
        let a = one_block(2);
        let h = herm(&a, &[&[2.0, 0.0], &[0.0, 0.5]]);
        assert!((entropy_matrix(&h, &a).unwrap() - 1.5 * LN_2).abs() < 1e-14);
        assert_eq!(entropy_matrix(&herm(&a, &[&[1.0, 0.0], &[0.0, 1.0]]), &a).unwrap(), 0.0);
        let h = herm(&a, &[&[1.5, 0.5], &[0.5, 1.5]]);
        assert!((entropy_matrix(&h, &a).unwrap() - 2.0 * LN_2).abs() < 1e-13);
    }

    #[test]
    fn phi_examples() {
        let a = one_block(2);
        let h = herm(&a, &[&[1.5, 0.5], &[0.5, 1.5]]);
        let z = contraction(&a, &[&[1.0, 0.0], &[0.0, 0.0]]);
        let r = phi_map(&h, &z, &a).unwrap();
        assert!((r.phi.element().sub(&Element::new(vec![CMatrix::from_real_diag(&[1.5, 1.5])]))).max_abs() < 1e-14);
        assert!(r.trace_residual < 1e-14);
        assert!(r.unital_residual.unwrap() < 1e-14);
        let (hh, hp) = entropy_monotone_under_phi(&h, &z, &a).unwrap();
        assert!((hp - 3.0 * 1.5f64.ln()).abs() < 1e-13 && hp <= hh);

        let z = contraction(&a, &[&[0.0, 1.0], &[1.0, 0.0]]);
        let (hh, hp) = entropy_monotone_under_phi(&h, &z, &a).unwrap();
        assert!((hh - hp).abs() < 1e-12);

        let z = contraction(&a, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((phi_map(&h, &z, &a).unwrap().phi.element().sub(h.element())).max_abs() < 1e-14);

        let z = contraction(&a, &[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(!z.normal);
        assert_eq!(entropy_monotone_under_phi(&h, &z, &a).unwrap_err().code(), "non_normal_contraction");
        assert!(phi_map(&h, &z, &a).unwrap().trace_residual < 1e-14);
    }

    #[test]
    fn polarization_scalar_and_zero() {
        let a = one_block(1);
        let y = Element::new(vec![CMatrix::from_real_diag(&[2.0])]);
        let h = Element::new(vec![CMatrix::from_real_diag(&[3.0])]);
        assert!(polarization_identity_check(&y, &h, &a).unwrap() < 1e-15);
        assert_eq!(polarization_identity_check(&a.zero(), &h, &a).unwrap(), 0.0);
    }

    #[test]
    fn log_monotonicity_examples() {
        let a = one_block(2);
        let one = herm(&a, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let h2 = herm(&a, &[&[E, 0.0], &[0.0, 1.0]]);
        assert!(log_monotonicity_check(&one, &h2, &a).unwrap().abs() < 1e-15);
        assert_eq!(log_monotonicity_check(&h2, &h2, &a).unwrap(), 0.0);
        assert!(log_monotonicity_check(&h2, &one, &a).is_err());
        for t in [1e-6, 0.3, 1.0, 2.0, E, 1e4] {
            assert!((log_integral_representation(t).unwrap() - t.ln()).abs() < 1e-9, "t={t}");
        }
        let h = herm(&a, &[&[2.0, 0.3], &[0.3, 0.5]]);
        assert!(log_shift_identity_residual(&h, 1e-3, &a).unwrap() < 1e-12);
    }

    #[test]
    fn trace_chain_examples() {
        let a = one_block(2);
        let h = herm(&a, &[&[1.5, 0.5], &[0.5, 1.5]]);
        let c = entropy_trace_monotonicity_check(&h, &h, &a).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-13 && c.holds());
        let zero = herm(&a, &[&[0.0, 0.0], &[0.0, 0.0]]);
        let p = herm(&a, &[&[1.0, 0.0], &[0.0, 0.0]]);
        let c = entropy_trace_monotonicity_check(&zero, &p, &a).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!((c.rhs - 2.0 * LN_2).abs() < 1e-15);
        assert!(entropy_trace_monotonicity_check(&p, &zero, &a).is_err());
    }

    #[test]
    fn domination_examples() {
        let a = one_block(2);
        let h = herm(&a, &[&[3.0, 0.0], &[0.0, 1.0]]);
        let z = Element::new(vec![CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])]);
        let rows = eigenvalue_domination_check(&h, &z, &a).unwrap();
        assert_eq!((rows[0].theta, rows[1].theta), (1.0, 0.0));
        assert_eq!((rows[0].bound, rows[1].bound), (3.0, 1.0));
        let u = Element::new(vec![CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])]);
        for r in eigenvalue_domination_check(&h, &u, &a).unwrap() {
            assert!((r.theta - r.bound).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = one_block(2);
        let e = HermitianElement::psd(&a, Element::new(vec![CMatrix::from_real_diag(&[1.0, -0.1])])).unwrap_err();
        assert_eq!(e.code(), "not_positive");
        let h = HermitianElement::psd(&a, Element::new(vec![CMatrix::from_real_diag(&[1.0, -1e-11])])).unwrap();
        assert_eq!(h.min_eigenvalue(), 0.0);
        let e = ContractionElement::new(&a, Element::new(vec![CMatrix::from_real_diag(&[2.0, 0.0])])).unwrap_err();
        assert_eq!(e.code(), "not_contraction");
        let e = HermitianElement::new(&a, Element::new(vec![CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])]))
            .unwrap_err();
        assert_eq!(e.code(), "not_hermitian");
    }
}
