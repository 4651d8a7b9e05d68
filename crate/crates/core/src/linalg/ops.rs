use nalgebra::linalg::{SymmetricEigen, QR, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::shape::SubsystemShape;
use super::state::{hermitian_residual, DensityOperator, LabeledMap, PureState};
use super::STATE_TOL;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Spectrum of a Hermitian matrix, eigenvalues in descending order with
/// matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= l;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eigendecomposition(m: &CMatrix) -> Result<Eigen> {
    if m.nrows() != m.ncols() {
        return Err(Error::shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let herm = hermitian_residual(m);
    if herm > STATE_TOL {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (residual {herm:.3e})"
        )));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    Ok(Eigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let herm = hermitian_residual(m);
    if herm > STATE_TOL {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (residual {herm:.3e})"
        )));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Square root of a positive semidefinite matrix; slightly negative
/// eigenvalues are clipped to zero.
pub fn matrix_sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let mut eig = hermitian_eigendecomposition(m)?;
    for l in eig.values.iter_mut() {
        *l = l.max(0.0).sqrt();
    }
    Ok(eig.reconstruct())
}

/// Root fidelity `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let prod = matrix_sqrt_psd(rho)? * matrix_sqrt_psd(sigma)?;
    Ok(prod.singular_values().iter().sum())
}

/// Purification `Σ √λ_i |v_i⟩|i⟩_ref`. The reference has the full system
/// dimension; eigenvalues are taken in descending order, so the support of
/// `ρ` occupies the leading reference basis vectors.
pub fn purify(rho: &DensityOperator, ref_label: &str) -> Result<PureState> {
    let d = rho.dim();
    let shape = rho
        .shape()
        .concat(&SubsystemShape::single(ref_label, d)?)?;
    let eig = hermitian_eigendecomposition(rho.data())?;
    let mut v = CVector::zeros(d * d);
    for (k, &l) in eig.values.iter().enumerate() {
        let amp = l.max(0.0).sqrt();
        if amp == 0.0 {
            continue;
        }
        for i in 0..d {
            v[i * d + k] = eig.vectors[(i, k)] * amp;
        }
    }
    PureState::normalized(v, shape)
}

/// Haar-distributed `d x d` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` pushed into `Q`. The Gaussian stream is ChaCha8
/// seeded with `seed`, so equal seeds give bit-identical matrices.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with_rng(d, &mut rng)
}

pub fn haar_unitary_with_rng<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let qr = QR::new(z);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Output of [`uhlmann_isometry`].
#[derive(Debug, Clone)]
pub struct Uhlmann {
    /// Isometry from the purifying system of `psi` to that of `phi`.
    pub isometry: LabeledMap,
    /// `|⟨φ|(1 ⊗ V)|ψ⟩|`, equal to the root fidelity of the shared marginals.
    pub overlap: f64,
}

/// Isometry `V: C -> B` maximizing `|⟨φ_AB|(1_A ⊗ V)|ψ_AC⟩|`.
///
/// The shared system `A` is the set of labels common to both states; the
/// remaining labels of `phi` form `B`, those of `psi` form `C`.
pub fn uhlmann_isometry(phi: &PureState, psi: &PureState) -> Result<Uhlmann> {
    let shared: Vec<&str> = phi
        .shape()
        .labels()
        .filter(|l| psi.shape().contains(l))
        .collect();
    for label in &shared {
        let (dp, ds) = (phi.shape().dim_of(label)?, psi.shape().dim_of(label)?);
        if dp != ds {
            return Err(Error::shape(format!(
                "shared system {label} has dimension {dp} vs {ds}"
            )));
        }
    }
    let b_labels = phi.shape().complement(&shared);
    let c_labels = psi.shape().complement(&shared);
    let b_shape = phi.shape().select(&b_labels)?;
    let c_shape = psi.shape().select(&c_labels)?;
    let (db, dc) = (b_shape.total_dim(), c_shape.total_dim());
    if dc > db {
        return Err(Error::shape(format!(
            "purifying system {c_shape} is larger than {b_shape}"
        )));
    }
    // |φ⟩ = Σ Φ_ab |a⟩|b⟩, |ψ⟩ = Σ Ψ_ac |a⟩|c⟩; ⟨φ|1⊗V|ψ⟩ = Σ_bc X_bc V_bc with X = Φ†Ψ
    let phi_m = phi.coefficient_matrix(&shared)?;
    let psi_m = psi.coefficient_matrix(&shared)?;
    let x = phi_m.adjoint() * psi_m;
    let svd = SVD::new(x, true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let overlap: f64 = svd.singular_values.iter().sum();
    // V = conj(U) W^T where X = U S W†, i.e. W^T = conj(v_t)
    let v = u.map(|z| z.conj()) * v_t.map(|z| z.conj());
    let isometry = LabeledMap::new(v, c_shape, b_shape)?;
    Ok(Uhlmann {
        isometry,
        overlap: overlap.min(1.0),
    })
}
