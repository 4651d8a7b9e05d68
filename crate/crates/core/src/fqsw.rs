//! Monte-Carlo check of the decoupling inequality behind state merging.
//!
//! For `|ψ⟩_{ABC}`, a split `A ≅ A1 ⊗ A2` and Haar-random `U` on `A`,
//!
//! ```text
//! E_U ‖ρ_{A1C}(U) − I/|A1| ⊗ ψ_C‖₁²  ≤  |A|·|C| / |A2|² · Tr ψ_{AC}²
//! ```
//!
//! where `ρ_{A1C}(U) = Tr_{A2}[(U ⊗ 1)ψ_{AC}(U ⊗ 1)†]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::purity;
use crate::linalg::{
    haar_unitary, purify, trace_norm, uhlmann_isometry, DensityOperator, LabeledMap,
    PureState, SubsystemShape,
};
use crate::random::{random_pure_state, rng_from_seed};
use crate::{CMatrix, Error, Result, C64};

pub const SYS_A: &str = "A";
pub const SYS_B: &str = "B";
pub const SYS_C: &str = "C";
/// Halves of `A` after the random unitary.
pub const SYS_A1: &str = "A1";
pub const SYS_A2: &str = "A2";

#[derive(Debug, Clone)]
pub struct DecouplingConfig {
    psi: PureState,
    a1_dim: usize,
    a2_dim: usize,
    trials: usize,
    seed: u64,
}

impl DecouplingConfig {
    /// `psi` must carry exactly the labels `A`, `B`, `C` (any order; `B`
    /// may have dimension 1) and `a1_dim · a2_dim` must equal `|A|`.
    pub fn new(
        psi: PureState,
        a1_dim: usize,
        a2_dim: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let shape = psi.shape();
        if shape.len() != 3 || ![SYS_A, SYS_B, SYS_C].iter().all(|l| shape.contains(l)) {
            return Err(Error::Labeling(format!(
                "decoupling input must live on [A, B, C], got {shape}"
            )));
        }
        let da = shape.dim_of(SYS_A)?;
        if a1_dim == 0 || a2_dim == 0 || a1_dim * a2_dim != da {
            return Err(Error::Shape(format!(
                "split {a1_dim} x {a2_dim} does not factor |A| = {da}"
            )));
        }
        if trials == 0 {
            return Err(Error::Parameter("trials must be >= 1".into()));
        }
        Ok(Self {
            psi,
            a1_dim,
            a2_dim,
            trials,
            seed,
        })
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn a1_dim(&self) -> usize {
        self.a1_dim
    }

    pub fn a2_dim(&self) -> usize {
        self.a2_dim
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn dim(&self, label: &str) -> usize {
        self.psi.shape().dim_of(label).expect("validated on construction")
    }

    fn split_shape(&self) -> SubsystemShape {
        SubsystemShape::new([(SYS_A1, self.a1_dim), (SYS_A2, self.a2_dim)])
            .expect("validated on construction")
    }

    /// `I/|A1| ⊗ ψ_C` on `[A1, C]`.
    fn target(&self) -> Result<DensityOperator> {
        let mixed = DensityOperator::maximally_mixed(SubsystemShape::single(SYS_A1, self.a1_dim)?);
        mixed.tensor(&self.psi.reduced(&[SYS_C])?)
    }

    fn rotated(&self, u: &CMatrix) -> Result<PureState> {
        let da = self.dim(SYS_A);
        if u.nrows() != da || u.ncols() != da {
            return Err(Error::Shape(format!(
                "unitary is {}x{}, |A| = {da}",
                u.nrows(),
                u.ncols()
            )));
        }
        let dev = (u.adjoint() * u - CMatrix::identity(da, da)).norm();
        if !(dev <= crate::channels::CHANNEL_TOL) {
            return Err(Error::Parameter(format!(
                "matrix on A is not unitary (deviation {dev:.3e})"
            )));
        }
        let map = LabeledMap::new(
            u.clone(),
            SubsystemShape::single(SYS_A, da)?,
            self.split_shape(),
        )?;
        self.psi.apply(&map)
    }
}

/// Right-hand side `|A||C| / |A2|² · Tr ψ_{AC}²`.
pub fn fqsw_bound(cfg: &DecouplingConfig) -> f64 {
    let da = cfg.dim(SYS_A) as f64;
    let dc = cfg.dim(SYS_C) as f64;
    let p = purity(&cfg.psi.reduced(&[SYS_A, SYS_C]).expect("labels validated"));
    da * dc / (cfg.a2_dim as f64).powi(2) * p
}

/// Haar unitary for a trial, seeded with `seed ^ trial_index`.
pub fn trial_unitary(cfg: &DecouplingConfig, trial_index: usize) -> CMatrix {
    haar_unitary(cfg.dim(SYS_A), cfg.seed ^ trial_index as u64)
}

/// `‖ρ_{A1C}(U) − I/|A1| ⊗ ψ_C‖₁²` for a given unitary on `A`.
pub fn decoupling_lhs(cfg: &DecouplingConfig, u: &CMatrix) -> Result<f64> {
    let rho = cfg
        .rotated(u)?
        .reduced(&[SYS_A1, SYS_C])?
        .permute(&[SYS_A1, SYS_C])?;
    let diff = rho.data() - cfg.target()?.data();
    Ok(trace_norm(&diff)?.powi(2))
}

pub fn decoupling_trial(cfg: &DecouplingConfig, trial_index: usize) -> f64 {
    decoupling_lhs(cfg, &trial_unitary(cfg, trial_index)).expect("Haar unitaries are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingResult {
    pub lhs_mean: f64,
    /// Standard error of the mean; 0 for a single trial.
    pub lhs_stderr: f64,
    pub lhs_min: f64,
    pub lhs_max: f64,
    pub rhs_bound: f64,
    pub bound_satisfied: bool,
    /// Trial index attaining `lhs_min`.
    pub best_trial: usize,
    pub trials: Vec<f64>,
}

pub fn monte_carlo(cfg: &DecouplingConfig) -> DecouplingResult {
    let trials: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| decoupling_trial(cfg, i))
        .collect();
    let n = trials.len() as f64;
    let mean = trials.iter().sum::<f64>() / n;
    let stderr = if trials.len() > 1 {
        let var = trials.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let mut best_trial = 0;
    for (i, &x) in trials.iter().enumerate() {
        if x < trials[best_trial] {
            best_trial = i;
        }
    }
    let lhs_max = trials.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rhs_bound = fqsw_bound(cfg);
    DecouplingResult {
        lhs_mean: mean,
        lhs_stderr: stderr,
        lhs_min: trials[best_trial],
        lhs_max,
        rhs_bound,
        bound_satisfied: mean <= rhs_bound + 3.0 * stderr,
        best_trial,
        trials,
    }
}

/// What Bob can extract after Alice applies `U` and sends `A2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementByproduct {
    /// `Tr ρ_{A1}²`; `1/|A1|` when `A1` is maximally mixed.
    pub purity_a1: f64,
    /// Root fidelity between the post-`U` state and `Φ_{A1A1'} ⊗ ψ_{CC'}`,
    /// maximized over Bob's decoding isometry on `A2 B`.
    pub maxent_fidelity: f64,
}

pub fn entanglement_byproduct(cfg: &DecouplingConfig, u: &CMatrix) -> Result<EntanglementByproduct> {
    let state = cfg.rotated(u)?;
    let purity_a1 = purity(&state.reduced(&[SYS_A1])?);

    let a1_ref = format!("{SYS_A1}'");
    let c_ref = format!("{SYS_C}'");
    let phi = PureState::maximally_entangled(SYS_A1, &a1_ref, cfg.a1_dim)?;
    let psi_cc = purify(&cfg.psi.reduced(&[SYS_C])?, &c_ref)?;
    let target = phi.tensor(&psi_cc)?;

    // Uhlmann needs the destination purifier to be the larger one
    let bob = cfg.a2_dim * cfg.dim(SYS_B);
    let reference = cfg.a1_dim * cfg.dim(SYS_C);
    let overlap = if reference <= bob {
        uhlmann_isometry(&state.permute(&[SYS_A1, SYS_C, SYS_A2, SYS_B])?, &target)?.overlap
    } else {
        let t = target.permute(&[SYS_A1, SYS_C, &a1_ref, &c_ref])?;
        uhlmann_isometry(&t, &state)?.overlap
    };
    Ok(EntanglementByproduct {
        purity_a1,
        maxent_fidelity: overlap,
    })
}

/// GHZ-type state `(Σ_k |k⟩_A |k⟩_B |k⟩_C)/√d` with `|A| = |B| = |C| = d`.
pub fn ghz_state(d: usize) -> Result<PureState> {
    let shape = SubsystemShape::new([(SYS_A, d), (SYS_B, d), (SYS_C, d)])?;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = crate::CVector::zeros(d * d * d);
    for k in 0..d {
        v[k * d * d + k * d + k] = amp;
    }
    PureState::new(v, shape)
}

/// `|Φ⟩_{AB} ⊗ |0⟩_C`: `A` maximally entangled with `B` and product with `C`.
pub fn decoupled_state(da: usize, dc: usize) -> Result<PureState> {
    let phi = PureState::maximally_entangled(SYS_A, SYS_B, da)?;
    let zero = PureState::basis(SubsystemShape::single(SYS_C, dc)?, 0)?;
    phi.tensor(&zero)
}

/// Haar-random pure state on `[A, B, C]`.
pub fn random_abc_state(da: usize, db: usize, dc: usize, seed: u64) -> Result<PureState> {
    let shape = SubsystemShape::new([(SYS_A, da), (SYS_B, db), (SYS_C, dc)])?;
    Ok(random_pure_state(shape, &mut rng_from_seed(seed)))
}
