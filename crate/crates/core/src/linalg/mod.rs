//! Finite-dimensional complex linear algebra with subsystem bookkeeping.
//!
//! Every matrix or vector carries a [`SubsystemShape`]: an ordered list of
//! labeled tensor factors. Flat indices are row-major over that list, so the
//! first factor is the most significant digit. Operations never reorder
//! subsystems unless asked to through [`LabeledMatrix::permute`] or
//! [`PureState::permute`].

mod ops;
mod shape;
pub(crate) mod state;

pub use ops::{
    fidelity, haar_unitary, haar_unitary_with_rng, hermitian_eigendecomposition, hermitian_eigenvalues, matrix_sqrt_psd, purify, trace_norm,
    uhlmann_isometry, Eigen, Uhlmann,
};
pub use shape::SubsystemShape;
pub use state::{DensityOperator, LabeledMap, LabeledMatrix, PureState};

/// Absolute tolerance for Hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-9;
