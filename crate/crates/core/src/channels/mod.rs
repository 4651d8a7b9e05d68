//! CPTP maps in Kraus form and relay channels `N_{AD->BE}`.

mod relay;
mod spec;

pub use relay::{compose_relay, partial_swap, swap_unitary, RelayChannel, RelayVariant};
pub use spec::{ChannelSpec, RelaySpec, UnitarySpec};

use crate::labels;
use crate::linalg::state::splice_order;
use crate::linalg::{
    trace_norm, DensityOperator, LabeledMap, LabeledMatrix, PureState, SubsystemShape,
};
use crate::{CMatrix, Error, Result, C64};

/// Tolerance on `Σ K†K = I` and on isometry checks.
pub const CHANNEL_TOL: f64 = 1e-8;
/// Two channels are equal when their Choi matrices are this close in trace norm.
pub const CHOI_EQ_TOL: f64 = 1e-7;

/// Default labels of single-system channels built by [`make_channel`].
pub const INPUT_LABEL: &str = "X";
pub const OUTPUT_LABEL: &str = "Y";

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    input: SubsystemShape,
    output: SubsystemShape,
}

/// Largest entry of `|Σ K†K - I|`.
pub fn completeness_residual(kraus: &[CMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let din = first.ncols();
    let mut sum = CMatrix::zeros(din, din);
    for k in kraus {
        sum += k.adjoint() * k;
    }
    (sum - CMatrix::identity(din, din))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>, input: SubsystemShape, output: SubsystemShape) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::parameter("channel needs at least one Kraus operator"));
        }
        let (dout, din) = (output.total_dim(), input.total_dim());
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::shape(format!(
                    "Kraus operator {i} is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let res = completeness_residual(&kraus);
        if !(res <= CHANNEL_TOL) {
            return Err(Error::parameter(format!(
                "Kraus completeness violated by {res:.3e}"
            )));
        }
        Ok(Self {
            kraus,
            input,
            output,
        })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    pub fn input_shape(&self) -> &SubsystemShape {
        &self.input
    }

    pub fn output_shape(&self) -> &SubsystemShape {
        &self.output
    }

    pub fn input_dim(&self) -> usize {
        self.input.total_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.output.total_dim()
    }

    /// Same map with new subsystem labels.
    pub fn relabel(&self, input: &[&str], output: &[&str]) -> Result<Self> {
        Ok(Self {
            kraus: self.kraus.clone(),
            input: self.input.with_labels(input)?,
            output: self.output.with_labels(output)?,
        })
    }

    /// Reorder the output factors.
    pub fn permute_output(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.output.len() {
            return Err(Error::labeling(format!(
                "permutation {order:?} does not cover {}",
                self.output
            )));
        }
        let pos = self.output.positions(order)?;
        let map = self.output.permutation_map(&pos);
        let kraus = self
            .kraus
            .iter()
            .map(|k| {
                let mut out = CMatrix::zeros(k.nrows(), k.ncols());
                for (row, &m) in map.iter().enumerate() {
                    out.set_row(m, &k.row(row));
                }
                out
            })
            .collect();
        Ok(Self {
            kraus,
            input: self.input.clone(),
            output: self.output.select(order)?,
        })
    }

    /// `Σ_k (1 ⊗ K_k) ρ (1 ⊗ K_k)†` on the subsystems `acting_on`, whose
    /// dimensions must match the channel input in order. The output factors
    /// (with the channel's output labels) take the place of the first acted-on
    /// factor; all other factors keep their order.
    pub fn apply(&self, rho: &DensityOperator, acting_on: &[&str]) -> Result<DensityOperator> {
        let in_dims = self.input.dims();
        if acting_on.len() != in_dims.len() {
            return Err(Error::shape(format!(
                "channel input {} cannot act on {acting_on:?}",
                self.input
            )));
        }
        for (label, &dim) in acting_on.iter().zip(&in_dims) {
            let have = rho.shape().dim_of(label)?;
            if have != dim {
                return Err(Error::shape(format!(
                    "channel expects dimension {dim} on {label}, state has {have}"
                )));
            }
        }
        let rest = rho.shape().complement(acting_on);
        let rest_shape = rho.shape().select(&rest)?;
        let staged_shape = rest_shape.concat(&self.output)?;
        let mut order: Vec<&str> = rest.clone();
        order.extend_from_slice(acting_on);
        let permuted = rho.permute(&order)?;
        let r = rest_shape.total_dim();
        let eye = CMatrix::identity(r, r);
        let dout = r * self.output_dim();
        let mut out = CMatrix::zeros(dout, dout);
        for k in &self.kraus {
            let big = eye.kronecker(k);
            out += &big * permuted.data() * big.adjoint();
        }
        let staged =
            DensityOperator::new_unchecked(LabeledMatrix::new_unchecked(out, staged_shape));
        let final_order = splice_order(rho.shape(), acting_on, &self.output);
        let final_order: Vec<&str> = final_order.iter().map(String::as_str).collect();
        staged.permute(&final_order)
    }

    /// Apply to every input subsystem of a state defined on exactly the input.
    pub fn apply_all(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let labels: Vec<&str> = self.input.labels().collect();
        self.apply(rho, &labels)
    }

    /// Stinespring isometry `V = Σ_k K_k ⊗ |k⟩` into `output ⊗ env_label`.
    pub fn stinespring_with_env(&self, env_label: &str) -> Result<StinespringDilation> {
        let k = self.kraus.len();
        let out = self
            .output
            .concat(&SubsystemShape::single(env_label, k)?)?;
        let (dout, din) = (self.output_dim(), self.input_dim());
        let mut v = CMatrix::zeros(dout * k, din);
        for (e, kr) in self.kraus.iter().enumerate() {
            for o in 0..dout {
                for i in 0..din {
                    v[(o * k + e, i)] = kr[(o, i)];
                }
            }
        }
        Ok(StinespringDilation {
            isometry: LabeledMap::new(v, self.input.clone(), out)?,
            env_label: env_label.to_string(),
            env_dim: k,
        })
    }

    /// Stinespring dilation with environment labeled [`labels::JO`].
    pub fn stinespring(&self) -> Result<StinespringDilation> {
        self.stinespring_with_env(labels::JO)
    }

    /// Channel `ρ ↦ Tr_{traced}(VρV†)` onto `keep_outputs ⊗ env`, where the
    /// traced part is every output factor not in `keep_outputs`.
    pub fn environment_channel(&self, keep_outputs: &[&str]) -> Result<QuantumChannel> {
        let dil = self.stinespring()?;
        let vshape = dil.isometry.output_shape();
        let mut keep: Vec<&str> = keep_outputs.to_vec();
        keep.push(dil.env_label.as_str());
        let out_shape = vshape.select(&keep)?;
        let pos = vshape.positions(&keep)?;
        let (kept, traced, kd, td) = vshape.split_indices(&pos);
        let v = dil.isometry.data();
        let din = self.input_dim();
        let mut kraus = vec![CMatrix::zeros(kd, din); td];
        for (flat, (&k, &t)) in kept.iter().zip(traced.iter()).enumerate() {
            kraus[t].set_row(k, &v.row(flat));
        }
        QuantumChannel::new(kraus, self.input.clone(), out_shape)
    }

    /// Normalized Choi state `(N ⊗ id)(Φ)`; reference factors are labeled
    /// with a trailing `'`.
    pub fn choi(&self) -> Result<DensityOperator> {
        let din = self.input_dim();
        let refs: Vec<(String, usize)> = self
            .input
            .entries()
            .iter()
            .map(|(l, d)| (format!("{l}'"), *d))
            .collect();
        let shape = self.input.concat(&SubsystemShape::new(refs)?)?;
        let mut v = crate::CVector::zeros(din * din);
        let amp = C64::new(1.0 / (din as f64).sqrt(), 0.0);
        for i in 0..din {
            v[i * din + i] = amp;
        }
        let phi = PureState::new(v, shape)?;
        let labels: Vec<&str> = self.input.labels().collect();
        self.apply(&phi.to_density(), &labels)
    }

    /// Choi-matrix trace distance `‖J(self) - J(other)‖₁`; shapes must agree.
    pub fn choi_distance(&self, other: &QuantumChannel) -> Result<f64> {
        if self.input != other.input || self.output != other.output {
            return Err(Error::shape(format!(
                "cannot compare {} -> {} with {} -> {}",
                self.input, self.output, other.input, other.output
            )));
        }
        let diff = self.choi()?.data() - other.choi()?.data();
        trace_norm(&diff)
    }

    pub fn equivalent_to(&self, other: &QuantumChannel) -> Result<bool> {
        Ok(self.choi_distance(other)? <= CHOI_EQ_TOL)
    }
}

/// Isometric extension `V: input -> output ⊗ env`.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub isometry: LabeledMap,
    pub env_label: String,
    pub env_dim: usize,
}

/// Free-function form of [`QuantumChannel::apply`].
pub fn apply_channel(
    ch: &QuantumChannel,
    rho: &DensityOperator,
    acting_on: &[&str],
) -> Result<DensityOperator> {
    ch.apply(rho, acting_on)
}

pub fn stinespring_isometry(ch: &QuantumChannel) -> Result<StinespringDilation> {
    ch.stinespring()
}

/// Channel to the full Stinespring environment.
pub fn complementary_channel(ch: &QuantumChannel) -> Result<QuantumChannel> {
    ch.environment_channel(&[])
}

pub fn choi_matrix(ch: &QuantumChannel) -> Result<DensityOperator> {
    ch.choi()
}

/// Standard channel families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    Identity { d: usize },
    /// `ρ ↦ (1-p)ρ + p·I/d`.
    Depolarizing { d: usize, p: f64 },
    /// Output dimension `d+1`, the flag is the last basis vector.
    Erasure { d: usize, p: f64 },
    AmplitudeDamping { gamma: f64 },
    /// `ρ ↦ (1-p)ρ + p·ZρZ`.
    Dephasing { p: f64 },
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::parameter(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::parameter(format!("dimension {d} must be at least 2")));
    }
    Ok(())
}

/// Generalized Pauli `X^a Z^b` on `C^d`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> CMatrix {
    let mut w = CMatrix::zeros(d, d);
    for j in 0..d {
        let angle = 2.0 * std::f64::consts::PI * ((b * j) % d) as f64 / d as f64;
        w[((j + a) % d, j)] = C64::from_polar(1.0, angle);
    }
    w
}

/// Build a standard channel `X -> Y`.
pub fn make_channel(kind: ChannelKind) -> Result<QuantumChannel> {
    let real = |x: f64| C64::new(x, 0.0);
    let (kraus, din, dout) = match kind {
        ChannelKind::Identity { d } => {
            check_dim(d)?;
            (vec![CMatrix::identity(d, d)], d, d)
        }
        ChannelKind::Depolarizing { d, p } => {
            check_dim(d)?;
            check_prob("p", p)?;
            let dd = (d * d) as f64;
            let mut kraus = Vec::with_capacity(d * d);
            for a in 0..d {
                for b in 0..d {
                    let weight = if a == 0 && b == 0 {
                        1.0 - p + p / dd
                    } else {
                        p / dd
                    };
                    kraus.push(weyl_operator(d, a, b) * real(weight.sqrt()));
                }
            }
            (kraus, d, d)
        }
        ChannelKind::Erasure { d, p } => {
            check_dim(d)?;
            check_prob("p", p)?;
            let mut keep = CMatrix::zeros(d + 1, d);
            for i in 0..d {
                keep[(i, i)] = real((1.0 - p).sqrt());
            }
            let mut kraus = vec![keep];
            for i in 0..d {
                let mut k = CMatrix::zeros(d + 1, d);
                k[(d, i)] = real(p.sqrt());
                kraus.push(k);
            }
            (kraus, d, d + 1)
        }
        ChannelKind::AmplitudeDamping { gamma } => {
            check_prob("gamma", gamma)?;
            let mut k0 = CMatrix::zeros(2, 2);
            k0[(0, 0)] = real(1.0);
            k0[(1, 1)] = real((1.0 - gamma).sqrt());
            let mut k1 = CMatrix::zeros(2, 2);
            k1[(0, 1)] = real(gamma.sqrt());
            (vec![k0, k1], 2, 2)
        }
        ChannelKind::Dephasing { p } => {
            check_prob("p", p)?;
            let z = weyl_operator(2, 0, 1);
            (
                vec![
                    CMatrix::identity(2, 2) * real((1.0 - p).sqrt()),
                    z * real(p.sqrt()),
                ],
                2,
                2,
            )
        }
    };
    QuantumChannel::new(
        kraus,
        SubsystemShape::single(INPUT_LABEL, din)?,
        SubsystemShape::single(OUTPUT_LABEL, dout)?,
    )
}
