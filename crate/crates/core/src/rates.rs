//! Decode-forward rate functionals.
//!
//! For a relay channel `N_{AD->BE}` and a pure input `|σ⟩_{A1 A D}` the
//! output is `ω_{A1 B E} = (id_{A1} ⊗ N)(σ)`. A [`RateReport`] holds every
//! entropic quantity the decode-forward region is built from, and the two
//! single-letter rates
//!
//! - unassisted: `max(0, min{I(A1⟩B)_ω, I(A1⟩E)_ω})`,
//! - entanglement assisted: `max(0, ½I(A1;B)_ω − ½I(A1;D)_σ)`.

use serde::{Deserialize, Serialize};

use crate::channels::{QuantumChannel, RelayChannel, StinespringDilation};
use crate::entropy::shannon_entropy_bits;
use crate::labels::{A, B, D, E};
use crate::linalg::{hermitian_eigenvalues, PureState, STATE_TOL};
use crate::optimize::{channel_coherent_information, OptimizerConfig};
use crate::{Error, Result};

/// Quantum rate and entanglement rates, per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    #[serde(rename = "Q")]
    pub q: f64,
    /// Entanglement consumed at the destination.
    #[serde(rename = "L_B")]
    pub l_b: f64,
    /// By-product entanglement generated towards the destination.
    #[serde(rename = "L_B_hat")]
    pub l_b_hat: f64,
    /// Entanglement consumed at the relay.
    #[serde(rename = "L_E", default)]
    pub l_e: f64,
    /// By-product entanglement generated towards the relay.
    #[serde(rename = "L_E_hat", default)]
    pub l_e_hat: f64,
}

impl RatePoint {
    pub fn new(q: f64, l_b: f64, l_b_hat: f64, l_e: f64, l_e_hat: f64) -> Result<Self> {
        let pt = Self {
            q,
            l_b,
            l_b_hat,
            l_e,
            l_e_hat,
        };
        pt.validate()?;
        Ok(pt)
    }

    /// Quantum rate `q` with no entanglement assistance.
    pub fn unassisted(q: f64) -> Self {
        Self {
            q,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Q", self.q),
            ("L_B", self.l_b),
            ("L_B_hat", self.l_b_hat),
            ("L_E", self.l_e),
            ("L_E_hat", self.l_e_hat),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(format!(
                    "rate {name} = {v} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }
}

/// Entropic quantities of one (channel, input state) pair, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// `H(A1|D)_σ`
    pub h_a1_given_d: f64,
    /// `I(A1⟩E)_ω`
    #[serde(rename = "coh_a1_E")]
    pub coh_a1_e: f64,
    /// `I(A1⟩B)_ω`
    #[serde(rename = "coh_a1_B")]
    pub coh_a1_b: f64,
    /// `I(A1;B)_ω`
    #[serde(rename = "mi_a1_B")]
    pub mi_a1_b: f64,
    /// `I(A1;D)_σ`
    #[serde(rename = "mi_a1_D")]
    pub mi_a1_d: f64,
    pub q_df: f64,
    pub q_ea_df: f64,
}

impl RateReport {
    /// Assemble a report, deriving `q_df` and `q_ea_df`.
    pub fn from_quantities(
        h_a1_given_d: f64,
        coh_a1_e: f64,
        coh_a1_b: f64,
        mi_a1_b: f64,
        mi_a1_d: f64,
    ) -> Self {
        let mut r = Self {
            h_a1_given_d,
            coh_a1_e,
            coh_a1_b,
            mi_a1_b,
            mi_a1_d,
            q_df: 0.0,
            q_ea_df: 0.0,
        };
        r.q_df = r.df_objective().max(0.0);
        r.q_ea_df = r.ea_objective().max(0.0);
        r
    }

    /// Unclipped `min{I(A1⟩B), I(A1⟩E)}`.
    pub fn df_objective(&self) -> f64 {
        self.coh_a1_b.min(self.coh_a1_e)
    }

    /// Unclipped `½I(A1;B) − ½I(A1;D)`.
    pub fn ea_objective(&self) -> f64 {
        0.5 * self.mi_a1_b - 0.5 * self.mi_a1_d
    }
}

/// Label of the auxiliary system of `sigma`: its one factor besides `A` and `D`.
pub(crate) fn auxiliary_label(sigma: &PureState) -> Result<String> {
    let shape = sigma.shape();
    if shape.len() != 3 || !shape.contains(A) || !shape.contains(D) {
        return Err(Error::Labeling(format!(
            "input state must live on [A1, A, D], got {shape}"
        )));
    }
    Ok(shape.complement(&[A, D])[0].to_string())
}

/// Evaluates [`RateReport`]s for a fixed relay channel.
///
/// The output is computed as the pure state `(1 ⊗ V)|σ⟩` on `A1 B E J_O`
/// with `V` the Stinespring isometry, so every marginal of `ω` is a cheap
/// reduction of a vector.
#[derive(Debug, Clone)]
pub struct RateEvaluator {
    relay: RelayChannel,
    dilation: StinespringDilation,
}

fn entropy_of(m: &crate::CMatrix) -> f64 {
    shannon_entropy_bits(&hermitian_eigenvalues(m).expect("reduced states are Hermitian"))
}

impl RateEvaluator {
    pub fn new(relay: &RelayChannel) -> Result<Self> {
        Ok(Self {
            relay: relay.clone(),
            dilation: relay.channel().stinespring()?,
        })
    }

    pub fn relay(&self) -> &RelayChannel {
        &self.relay
    }

    pub fn evaluate(&self, sigma: &PureState) -> Result<RateReport> {
        let a1 = auxiliary_label(sigma)?;
        let a1 = a1.as_str();
        let [da, dd] = self.relay.input_dims();
        if sigma.shape().dim_of(A)? != da || sigma.shape().dim_of(D)? != dd {
            return Err(Error::Shape(format!(
                "input state {} does not match channel inputs A:{da}, D:{dd}",
                sigma.shape()
            )));
        }
        if sigma.shape().contains(&self.dilation.env_label) {
            return Err(Error::Labeling(format!(
                "auxiliary label {a1} collides with the channel environment"
            )));
        }
        let h = |state: &PureState, labels: &[&str]| -> Result<f64> {
            let m = state.coefficient_matrix(labels)?;
            // the smaller Gram matrix has the same nonzero spectrum
            if m.nrows() <= m.ncols() {
                Ok(entropy_of(&(&m * m.adjoint())))
            } else {
                Ok(entropy_of(&(m.adjoint() * &m)))
            }
        };
        let h_a1 = h(sigma, &[a1])?;
        let h_d = h(sigma, &[D])?;
        let h_a1d = h(sigma, &[a1, D])?;

        let omega = sigma.apply_unnormalized(&self.dilation.isometry)?;
        let h_b = h(&omega, &[B])?;
        let h_e = h(&omega, &[E])?;
        let h_a1b = h(&omega, &[a1, B])?;
        let h_a1e = h(&omega, &[a1, E])?;

        let clip = |i: f64| if i < 0.0 && i >= -STATE_TOL { 0.0 } else { i };
        Ok(RateReport::from_quantities(
            h_a1d - h_d,
            h_e - h_a1e,
            h_b - h_a1b,
            clip(h_a1 + h_b - h_a1b),
            clip(h_a1 + h_d - h_a1d),
        ))
    }
}

/// All rate quantities for `(ch, σ)`; `σ` lives on `[A1, A, D]` in any order.
pub fn evaluate_state_rates(ch: &RelayChannel, sigma: &PureState) -> Result<RateReport> {
    RateEvaluator::new(ch)?.evaluate(sigma)
}

/// Slacks of the three rate-region inequalities for a rate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// `H(A1|D) − L_B + L̂_B − Q`
    pub slack_1: f64,
    /// `I(A1⟩E) − L_B − L̂_B − Q`
    pub slack_2: f64,
    /// `I(A1⟩B) + L_B − L̂_B − Q`
    pub slack_3: f64,
    pub feasible_1: bool,
    pub feasible_2: bool,
    pub feasible_3: bool,
    pub feasible: bool,
    /// Net entanglement consumption `L_B − L̂_B`.
    pub net_consumption: f64,
}

impl Feasibility {
    pub fn slacks(&self) -> [f64; 3] {
        [self.slack_1, self.slack_2, self.slack_3]
    }
}

/// Evaluate the rate-region inequalities. Only `Q`, `L_B` and `L̂_B` enter;
/// the relay's rates appear in [`decoupling_exponents`].
pub fn check_rate_point(report: &RateReport, pt: &RatePoint) -> Feasibility {
    let slack_1 = report.h_a1_given_d - pt.l_b + pt.l_b_hat - pt.q;
    let slack_2 = report.coh_a1_e - pt.l_b - pt.l_b_hat - pt.q;
    let slack_3 = report.coh_a1_b + pt.l_b - pt.l_b_hat - pt.q;
    let (f1, f2, f3) = (slack_1 >= 0.0, slack_2 >= 0.0, slack_3 >= 0.0);
    Feasibility {
        slack_1,
        slack_2,
        slack_3,
        feasible_1: f1,
        feasible_2: f2,
        feasible_3: f3,
        feasible: f1 && f2 && f3,
        net_consumption: pt.l_b - pt.l_b_hat,
    }
}

/// Exponents of the three decoupling errors; each error vanishes
/// asymptotically when its exponent exceeds `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingExponents {
    /// At the relay's transmitter.
    pub e1: f64,
    /// At the relay's receiver.
    pub e2: f64,
    /// At the destination.
    pub e3: f64,
    pub feasible_1: bool,
    pub feasible_2: bool,
    pub feasible_3: bool,
    pub delta: f64,
}

impl DecouplingExponents {
    pub fn feasible(&self) -> [bool; 3] {
        [self.feasible_1, self.feasible_2, self.feasible_3]
    }

    pub fn all_feasible(&self) -> bool {
        self.feasible_1 && self.feasible_2 && self.feasible_3
    }
}

pub fn decoupling_exponents(
    report: &RateReport,
    pt: &RatePoint,
    delta: f64,
) -> Result<DecouplingExponents> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Parameter(format!("delta = {delta} must be >= 0")));
    }
    let e1 = report.h_a1_given_d - pt.l_e - pt.l_b + pt.l_e_hat + pt.l_b_hat - pt.q;
    let e2 = report.coh_a1_e + pt.l_e - pt.l_b - pt.l_e_hat - pt.l_b_hat - pt.q;
    let e3 = report.coh_a1_b - pt.l_e + pt.l_b - pt.l_e_hat - pt.l_b_hat - pt.q;
    Ok(DecouplingExponents {
        e1,
        e2,
        e3,
        feasible_1: e1 > delta,
        feasible_2: e2 > delta,
        feasible_3: e3 > delta,
        delta,
    })
}

/// Classical rate reachable by superdense coding on top of `q_ea_df`.
pub fn superdense_classical_rate(report: &RateReport) -> f64 {
    2.0 * report.q_ea_df
}

/// `max(0, min{I_c(M), I_c(P)})` for orthogonal links `P: A->E`, `M: D->B`.
pub fn orthogonal_links_bound(
    p: &QuantumChannel,
    m: &QuantumChannel,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let ic_m = channel_coherent_information(m, cfg)?;
    let ic_p = channel_coherent_information(p, cfg)?;
    Ok(ic_m.min(ic_p).max(0.0))
}
