use super::{QuantumChannel, CHANNEL_TOL};
use crate::labels::{A, B, D, E};
use crate::linalg::{PureState, SubsystemShape};
use crate::{CMatrix, Error, Result, C64};

/// Relay channel `N_{AD->BE}`: inputs labeled `[A, D]`, outputs `[B, E]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannel(QuantumChannel);

/// Ways of assembling a relay channel from smaller pieces.
#[derive(Debug, Clone)]
pub enum RelayVariant {
    /// `N = P_{A->E} ⊗ M_{D->B}`.
    Orthogonal {
        p: QuantumChannel,
        m: QuantumChannel,
    },
    /// Joint unitary on `A ⊗ D`; its first output factor feeds `noise_b`
    /// (towards `B`), its second feeds `noise_e` (towards `E`).
    Interaction {
        unitary: CMatrix,
        noise_b: QuantumChannel,
        noise_e: QuantumChannel,
    },
}

pub fn compose_relay(variant: RelayVariant) -> Result<RelayChannel> {
    match variant {
        RelayVariant::Orthogonal { p, m } => RelayChannel::orthogonal(&p, &m),
        RelayVariant::Interaction {
            unitary,
            noise_b,
            noise_e,
        } => RelayChannel::interaction(&unitary, &noise_b, &noise_e),
    }
}

/// SWAP on `C^d ⊗ C^d`.
pub fn swap_unitary(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// `cos θ · I + i sin θ · SWAP`; `θ = π/2` is a full swap up to phase.
pub fn partial_swap(d: usize, theta: f64) -> CMatrix {
    let n = d * d;
    CMatrix::identity(n, n) * C64::new(theta.cos(), 0.0)
        + swap_unitary(d) * C64::new(0.0, theta.sin())
}

fn relay_shapes(dims_in: [usize; 2], dims_out: [usize; 2]) -> Result<(SubsystemShape, SubsystemShape)> {
    Ok((
        SubsystemShape::new([(A, dims_in[0]), (D, dims_in[1])])?,
        SubsystemShape::new([(B, dims_out[0]), (E, dims_out[1])])?,
    ))
}

impl RelayChannel {
    /// Wrap a channel whose shapes are exactly `[A, D] -> [B, E]`.
    pub fn new(ch: QuantumChannel) -> Result<Self> {
        let ins: Vec<&str> = ch.input_shape().labels().collect();
        let outs: Vec<&str> = ch.output_shape().labels().collect();
        if ins != [A, D] || outs != [B, E] {
            return Err(Error::labeling(format!(
                "relay channel must map [A, D] -> [B, E], got {} -> {}",
                ch.input_shape(),
                ch.output_shape()
            )));
        }
        Ok(Self(ch))
    }

    pub fn from_kraus(kraus: Vec<CMatrix>, dims_in: [usize; 2], dims_out: [usize; 2]) -> Result<Self> {
        let (input, output) = relay_shapes(dims_in, dims_out)?;
        Self::new(QuantumChannel::new(kraus, input, output)?)
    }

    /// Kraus set `{P_i ⊗ M_j}` with outputs reordered to `[B, E]`.
    pub fn orthogonal(p: &QuantumChannel, m: &QuantumChannel) -> Result<Self> {
        let (da, de) = (p.input_dim(), p.output_dim());
        let (dd, db) = (m.input_dim(), m.output_dim());
        let mut kraus = Vec::with_capacity(p.kraus_count() * m.kraus_count());
        for pk in p.kraus() {
            for mk in m.kraus() {
                let mut k = CMatrix::zeros(db * de, da * dd);
                for a in 0..da {
                    for d in 0..dd {
                        for e in 0..de {
                            for b in 0..db {
                                k[(b * de + e, a * dd + d)] = pk[(e, a)] * mk[(b, d)];
                            }
                        }
                    }
                }
                kraus.push(k);
            }
        }
        Self::from_kraus(kraus, [da, dd], [db, de])
    }

    /// Kraus set `{(Nb_i ⊗ Ne_j) U}`.
    pub fn interaction(
        unitary: &CMatrix,
        noise_b: &QuantumChannel,
        noise_e: &QuantumChannel,
    ) -> Result<Self> {
        let (da, dd) = (noise_b.input_dim(), noise_e.input_dim());
        let n = da * dd;
        if unitary.nrows() != n || unitary.ncols() != n {
            return Err(Error::shape(format!(
                "interaction unitary is {}x{}, expected {n}x{n}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        let dev = (unitary.adjoint() * unitary - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !(dev <= CHANNEL_TOL) {
            return Err(Error::parameter(format!(
                "interaction matrix is not unitary (deviation {dev:.3e})"
            )));
        }
        let mut kraus = Vec::with_capacity(noise_b.kraus_count() * noise_e.kraus_count());
        for bk in noise_b.kraus() {
            for ek in noise_e.kraus() {
                kraus.push(bk.kronecker(ek) * unitary);
            }
        }
        Self::from_kraus(
            kraus,
            [da, dd],
            [noise_b.output_dim(), noise_e.output_dim()],
        )
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.0
    }

    pub fn into_channel(self) -> QuantumChannel {
        self.0
    }

    pub fn input_dims(&self) -> [usize; 2] {
        let d = self.0.input_shape().dims();
        [d[0], d[1]]
    }

    pub fn output_dims(&self) -> [usize; 2] {
        let d = self.0.output_shape().dims();
        [d[0], d[1]]
    }

    /// Channel `A -> B` obtained by feeding `relay_input` into `D` and
    /// discarding `E`.
    pub fn induced_direct_channel(&self, relay_input: &PureState) -> Result<QuantumChannel> {
        let [da, dd] = self.input_dims();
        let [db, de] = self.output_dims();
        if relay_input.dim() != dd {
            return Err(Error::shape(format!(
                "relay input has dimension {}, D has {dd}",
                relay_input.dim()
            )));
        }
        let psi = relay_input.data();
        let mut kraus = Vec::with_capacity(self.0.kraus_count() * de);
        for k in self.0.kraus() {
            for e in 0..de {
                let mut f = CMatrix::zeros(db, da);
                for b in 0..db {
                    for a in 0..da {
                        let mut acc = C64::new(0.0, 0.0);
                        for d in 0..dd {
                            acc += k[(b * de + e, a * dd + d)] * psi[d];
                        }
                        f[(b, a)] = acc;
                    }
                }
                kraus.push(f);
            }
        }
        QuantumChannel::new(
            kraus,
            SubsystemShape::single(A, da)?,
            SubsystemShape::single(B, db)?,
        )
    }

    /// Channels from `AD` to the relay's environment `J_E = B J_O` and to
    /// the destination's environment `J_B = E J_O`.
    pub fn environment_channels(&self) -> Result<(QuantumChannel, QuantumChannel)> {
        Ok((
            self.0.environment_channel(&[B])?,
            self.0.environment_channel(&[E])?,
        ))
    }
}
