//! Entropic functionals, in bits.

use crate::linalg::{hermitian_eigenvalues, DensityOperator, STATE_TOL};
use crate::{Error, Result};

/// Eigenvalues below this are treated as exactly zero before taking logs.
pub const EIGEN_CLIP: f64 = 1e-12;

/// `-Σ λ log₂ λ` over a spectrum, ignoring eigenvalues below [`EIGEN_CLIP`].
pub fn shannon_entropy_bits(spectrum: &[f64]) -> f64 {
    let h: f64 = spectrum
        .iter()
        .filter(|&&l| l > EIGEN_CLIP)
        .map(|&l| -l * l.log2())
        .sum();
    h.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let spectrum = hermitian_eigenvalues(rho.data()).expect("density operators are Hermitian");
    shannon_entropy_bits(&spectrum)
}

/// Entropy of the marginal on `labels`.
pub fn marginal_entropy(rho: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    if labels.len() == rho.shape().len() {
        // still validates the labels
        rho.shape().positions(labels)?;
        return Ok(von_neumann_entropy(rho));
    }
    Ok(von_neumann_entropy(&rho.partial_trace(labels)?))
}

fn disjoint_union<'a>(a: &[&'a str], b: &[&'a str]) -> Result<Vec<&'a str>> {
    if let Some(l) = a.iter().find(|l| b.contains(l)) {
        return Err(Error::Labeling(format!("label {l} appears on both sides")));
    }
    Ok(a.iter().chain(b.iter()).copied().collect())
}

/// `H(AB) - H(B)`; may be negative.
pub fn conditional_entropy(rho: &DensityOperator, sys_a: &[&str], sys_b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(sys_a, sys_b)?;
    Ok(marginal_entropy(rho, &ab)? - marginal_entropy(rho, sys_b)?)
}

/// `H(A) + H(B) - H(AB)`, clipped to 0 when within tolerance below it.
pub fn mutual_information(rho: &DensityOperator, sys_a: &[&str], sys_b: &[&str]) -> Result<f64> {
    let ab = disjoint_union(sys_a, sys_b)?;
    let i = marginal_entropy(rho, sys_a)? + marginal_entropy(rho, sys_b)?
        - marginal_entropy(rho, &ab)?;
    Ok(if i < 0.0 && i >= -STATE_TOL { 0.0 } else { i })
}

/// `I(A⟩B) = H(B) - H(AB)`.
pub fn coherent_information(rho: &DensityOperator, sys_a: &[&str], sys_b: &[&str]) -> Result<f64> {
    Ok(-conditional_entropy(rho, sys_a, sys_b)?)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityOperator) -> f64 {
    let m = rho.data();
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy_bits(&[p, 1.0 - p])
}
