//! Seeded random states and channels for sampling baselines and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::QuantumChannel;
use crate::linalg::{DensityOperator, LabeledMatrix, PureState, SubsystemShape};
use crate::{CMatrix, CVector, Result, C64};

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(shape: SubsystemShape, rng: &mut R) -> PureState {
    let d = shape.total_dim();
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(v, shape).expect("gaussian vector is nonzero")
}

/// Random density operator `G G† / Tr(G G†)` with `G` a `d x rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(
    shape: SubsystemShape,
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let d = shape.total_dim();
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    let m = (&m + m.adjoint()).scale(0.5);
    DensityOperator::new(LabeledMatrix::new(m, shape).expect("shape matches"))
        .expect("Ginibre construction is a state")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// Random channel with `kraus_count` Kraus operators, cut from a Haar
/// isometry `input -> output ⊗ env`.
pub fn random_channel<R: Rng + ?Sized>(
    input: SubsystemShape,
    output: SubsystemShape,
    kraus_count: usize,
    rng: &mut R,
) -> Result<QuantumChannel> {
    let din = input.total_dim();
    let dout = output.total_dim();
    let k = kraus_count.max(1);
    let big = (dout * k).max(din);
    let u = crate::linalg::haar_unitary_with_rng(big, rng);
    let kraus = (0..k)
        .map(|e| CMatrix::from_fn(dout, din, |o, i| {
            let row = o * k + e;
            if row < big {
                u[(row, i)]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .collect();
    // when dout * k < din the cut is not an isometry; callers keep dout * k >= din
    QuantumChannel::new(kraus, input, output)
}
