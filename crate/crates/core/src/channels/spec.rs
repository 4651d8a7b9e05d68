//! Text descriptions of channels.
//!
//! A single channel is either named,
//! `{"kind": "depolarizing", "params": {"d": 2, "p": 0.1}}`, or explicit,
//! `{"kraus": [[[re, im], ...], ...], "input_dims": [...], "output_dims": [...]}`
//! where each Kraus operator is a list of rows of `[re, im]` pairs.
//! Relay channels are tagged by `"relay"`; see [`RelaySpec`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::relay::{partial_swap, swap_unitary, RelayChannel};
use super::{completeness_residual, make_channel, ChannelKind, QuantumChannel, INPUT_LABEL, OUTPUT_LABEL};
use crate::linalg::SubsystemShape;
use crate::{CMatrix, Error, Result, C64};

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named {
        kind: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Kraus {
        kraus: Vec<MatrixRows>,
        input_dims: Vec<usize>,
        output_dims: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "relay", rename_all = "snake_case")]
pub enum RelaySpec {
    /// `link` carries `A -> B`; `D` reaches `E` untouched.
    Direct {
        link: ChannelSpec,
        #[serde(default = "default_relay_dim")]
        relay_dim: usize,
    },
    /// `P: A -> E`, `M: D -> B`.
    Orthogonal { p: ChannelSpec, m: ChannelSpec },
    Interaction {
        unitary: UnitarySpec,
        noise_b: ChannelSpec,
        noise_e: ChannelSpec,
    },
    Kraus {
        kraus: Vec<MatrixRows>,
        input_dims: [usize; 2],
        output_dims: [usize; 2],
    },
}

fn default_relay_dim() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    /// `"identity"` or `"swap"`.
    Named(String),
    PartialSwap { partial_swap: f64 },
    Matrix(MatrixRows),
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::shape("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::shape("ragged matrix rows"));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

pub fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn factor_labels(base: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![base.to_string()]
    } else {
        (0..n).map(|i| format!("{base}{i}")).collect()
    }
}

fn shape_for(base: &str, dims: &[usize]) -> Result<SubsystemShape> {
    if dims.is_empty() {
        return Err(Error::shape("dimension list is empty"));
    }
    SubsystemShape::new(factor_labels(base, dims.len()).into_iter().zip(dims.iter().copied()))
}

fn take_param(params: &BTreeMap<String, f64>, name: &str, default: Option<f64>) -> Result<f64> {
    match params.get(name) {
        Some(&v) => Ok(v),
        None => default.ok_or_else(|| Error::parameter(format!("missing parameter {name}"))),
    }
}

fn as_dim(value: f64) -> Result<usize> {
    if value.fract() != 0.0 || !(value >= 1.0) || value > 4096.0 {
        return Err(Error::parameter(format!("dimension {value} is not a positive integer")));
    }
    Ok(value as usize)
}

fn kraus_matrices(kraus: &[MatrixRows]) -> Result<Vec<CMatrix>> {
    kraus.iter().map(matrix_from_rows).collect()
}

impl ChannelSpec {
    pub fn named(kind: &str, params: &[(&str, f64)]) -> Self {
        ChannelSpec::Named {
            kind: kind.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Explicit Kraus description of `ch`.
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        ChannelSpec::Kraus {
            kraus: ch.kraus().iter().map(matrix_to_rows).collect(),
            input_dims: ch.input_shape().dims(),
            output_dims: ch.output_shape().dims(),
        }
    }

    pub fn kind(&self) -> Result<ChannelKind> {
        let ChannelSpec::Named { kind, params } = self else {
            return Err(Error::parameter("explicit Kraus channel has no kind"));
        };
        let allowed: &[&str] = match kind.as_str() {
            "identity" => &["d"],
            "depolarizing" | "erasure" => &["d", "p"],
            "amplitude_damping" => &["gamma"],
            "dephasing" => &["p"],
            other => return Err(Error::parameter(format!("unknown channel kind {other:?}"))),
        };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::parameter(format!(
                "unknown parameter {extra:?} for channel {kind}"
            )));
        }
        let d = || -> Result<usize> { as_dim(take_param(params, "d", Some(2.0))?) };
        Ok(match kind.as_str() {
            "identity" => ChannelKind::Identity { d: d()? },
            "depolarizing" => ChannelKind::Depolarizing {
                d: d()?,
                p: take_param(params, "p", None)?,
            },
            "erasure" => ChannelKind::Erasure {
                d: d()?,
                p: take_param(params, "p", None)?,
            },
            "amplitude_damping" => ChannelKind::AmplitudeDamping {
                gamma: take_param(params, "gamma", None)?,
            },
            _ => ChannelKind::Dephasing {
                p: take_param(params, "p", None)?,
            },
        })
    }

    /// Build the channel, labeled `X -> Y` (or `X0, X1, ... -> Y0, ...`).
    pub fn build(&self) -> Result<QuantumChannel> {
        match self {
            ChannelSpec::Named { .. } => make_channel(self.kind()?),
            ChannelSpec::Kraus {
                kraus,
                input_dims,
                output_dims,
            } => QuantumChannel::new(
                kraus_matrices(kraus)?,
                shape_for(INPUT_LABEL, input_dims)?,
                shape_for(OUTPUT_LABEL, output_dims)?,
            ),
        }
    }

    /// Completeness deviation of an explicit Kraus list, `None` for named kinds.
    pub fn completeness_residual(&self) -> Result<Option<f64>> {
        match self {
            ChannelSpec::Named { .. } => Ok(None),
            ChannelSpec::Kraus { kraus, .. } => {
                Ok(Some(completeness_residual(&kraus_matrices(kraus)?)))
            }
        }
    }
}

impl UnitarySpec {
    /// The unitary on `C^da ⊗ C^dd`.
    pub fn build(&self, da: usize, dd: usize) -> Result<CMatrix> {
        let n = da * dd;
        match self {
            UnitarySpec::Named(name) => match name.as_str() {
                "identity" => Ok(CMatrix::identity(n, n)),
                "swap" if da == dd => Ok(swap_unitary(da)),
                "swap" => Err(Error::shape(format!(
                    "swap needs equal dimensions, got {da} and {dd}"
                ))),
                other => Err(Error::parameter(format!("unknown unitary {other:?}"))),
            },
            UnitarySpec::PartialSwap { partial_swap: theta } if da == dd => {
                Ok(partial_swap(da, *theta))
            }
            UnitarySpec::PartialSwap { .. } => Err(Error::shape(format!(
                "partial swap needs equal dimensions, got {da} and {dd}"
            ))),
            UnitarySpec::Matrix(rows) => matrix_from_rows(rows),
        }
    }
}

impl RelaySpec {
    pub fn build(&self) -> Result<RelayChannel> {
        match self {
            RelaySpec::Direct { link, relay_dim } => {
                let link = link.build()?;
                let pass = make_channel(ChannelKind::Identity { d: *relay_dim })?;
                let n = link.input_dim() * relay_dim;
                RelayChannel::interaction(&CMatrix::identity(n, n), &link, &pass)
            }
            RelaySpec::Orthogonal { p, m } => RelayChannel::orthogonal(&p.build()?, &m.build()?),
            RelaySpec::Interaction {
                unitary,
                noise_b,
                noise_e,
            } => {
                let (nb, ne) = (noise_b.build()?, noise_e.build()?);
                let u = unitary.build(nb.input_dim(), ne.input_dim())?;
                RelayChannel::interaction(&u, &nb, &ne)
            }
            RelaySpec::Kraus {
                kraus,
                input_dims,
                output_dims,
            } => RelayChannel::from_kraus(kraus_matrices(kraus)?, *input_dims, *output_dims),
        }
    }

    /// Completeness deviation of a relay given by explicit Kraus operators.
    pub fn completeness_residual(&self) -> Result<Option<f64>> {
        match self {
            RelaySpec::Kraus { kraus, .. } => {
                Ok(Some(completeness_residual(&kraus_matrices(kraus)?)))
            }
            _ => Ok(None),
        }
    }

    /// Every single-channel component, with a dotted path naming it.
    pub fn components(&self) -> Vec<(&'static str, &ChannelSpec)> {
        match self {
            RelaySpec::Direct { link, .. } => vec![("link", link)],
            RelaySpec::Orthogonal { p, m } => vec![("p", p), ("m", m)],
            RelaySpec::Interaction {
                noise_b, noise_e, ..
            } => vec![("noise_b", noise_b), ("noise_e", noise_e)],
            RelaySpec::Kraus { .. } => Vec::new(),
        }
    }
}
