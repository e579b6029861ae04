//! Seeded random instances.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, ContractionElement, Element, HermitianElement, MatrixError, WeightedMatrixAlgebra};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let data = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) / std::f64::consts::SQRT_2
        })
        .collect();
    CMatrix::from_vec(n, data)
}

pub fn gaussian_element(alg: &WeightedMatrixAlgebra, rng: &mut impl Rng) -> Element {
    Element::new(alg.blocks().iter().map(|b| gaussian(b.dim, rng)).collect())
}

/// `GG*` normalized to unit trace.
pub fn random_psd(alg: &WeightedMatrixAlgebra, rng: &mut impl Rng) -> Result<HermitianElement, MatrixError> {
    let g = gaussian_element(alg, rng);
    let h = g.mul(&g.adjoint());
    let t = alg.tau(&h);
    HermitianElement::psd(alg, h.scale_real(1.0 / t))
}

/// `h + qq*` with `q` Gaussian, scaled by `scale`.
pub fn random_psd_above(
    h: &HermitianElement,
    alg: &WeightedMatrixAlgebra,
    scale: f64,
    rng: &mut impl Rng,
) -> Result<HermitianElement, MatrixError> {
    let q = gaussian_element(alg, rng);
    HermitianElement::psd(alg, h.element().add(&q.mul(&q.adjoint()).scale_real(scale)))
}

/// Unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, rng);
    let mut q = CMatrix::zeros(n);
    for j in 0..n {
        let mut col: Vec<Complex64> = (0..n).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for k in 0..j {
                let dot: Complex64 = (0..n).map(|i| q[(i, k)].conj() * col[i]).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= dot * q[(i, k)];
                }
            }
        }
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for (i, c) in col.into_iter().enumerate() {
            q[(i, j)] = c / norm;
        }
    }
    q
}

pub fn random_unitary_element(alg: &WeightedMatrixAlgebra, rng: &mut impl Rng) -> Element {
    Element::new(alg.blocks().iter().map(|b| random_unitary(b.dim, rng)).collect())
}

/// Gaussian divided by its operator norm and a uniform factor in `(0, 1]`.
pub fn random_contraction(alg: &WeightedMatrixAlgebra, rng: &mut impl Rng) -> Result<ContractionElement, MatrixError> {
    let g = gaussian_element(alg, rng);
    let norm = g.operator_norm()?;
    let shrink: f64 = 1.0 - rng.random::<f64>();
    ContractionElement::new(alg, g.scale_real(shrink / (norm * (1.0 + 1e-12))))
}

/// `U D U*` with `D` diagonal, `|dᵢ| ≤ 1`.
pub fn random_normal_contraction(
    alg: &WeightedMatrixAlgebra,
    rng: &mut impl Rng,
) -> Result<ContractionElement, MatrixError> {
    let blocks = alg
        .blocks()
        .iter()
        .map(|b| {
            let u = random_unitary(b.dim, rng);
            let d: Vec<Complex64> = (0..b.dim)
                .map(|_| {
                    let r: f64 = rng.random();
                    let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    Complex64::from_polar(r, phase)
                })
                .collect();
            &(&u * &CMatrix::from_diag(&d)) * &u.adjoint()
        })
        .collect();
    ContractionElement::new(alg, Element::new(blocks))
}

/// Block sizes `dims` with weights drawn uniformly from `[0.5, 2]`.
pub fn random_algebra(dims: &[usize], rng: &mut impl Rng) -> Result<WeightedMatrixAlgebra, MatrixError> {
    WeightedMatrixAlgebra::new(
        dims.iter()
            .map(|&dim| super::Block {
                dim,
                weight: rng.random_range(0.5..=2.0),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let alg = WeightedMatrixAlgebra::full(4, 1.0).unwrap();
        let a = random_psd(&alg, &mut rng(7)).unwrap();
        let b = random_psd(&alg, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        assert!((alg.tau(a.element()) - 1.0).abs() < 1e-12);
        let u = random_unitary(4, &mut rng(1));
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(4)).max_abs() < 1e-13);
        let z = random_normal_contraction(&alg, &mut rng(2)).unwrap();
        assert!(z.normal && z.norm <= 1.0 + 1e-10);
        let z = random_contraction(&alg, &mut rng(3)).unwrap();
        assert!(z.norm <= 1.0);
    }
}
