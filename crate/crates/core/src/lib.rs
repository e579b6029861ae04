//! Numerical laboratory for the entropy functional `H(h) = τ(h log h)` on
//! semifinite algebras, realized on two concrete models: discrete spectral
//! densities with analytic tails, and weighted-trace block matrix algebras.

// `!(x < tol)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod numeric;
pub mod quadrature;
pub mod spectral;
pub mod entropy;
pub mod regularization;
pub mod semicontinuity;
pub mod constructions;
pub mod matrix;
