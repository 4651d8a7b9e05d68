//! Maximization of the decode-forward rates over pure inputs `|σ⟩_{A1 A D}`.
//!
//! Inputs are parameterized by their unnormalized amplitudes (real and
//! imaginary parts interleaved) and searched with a multi-restart adaptive
//! Nelder–Mead. Restart `r` starts from a Gaussian point drawn with seed
//! `seed ^ r`; restarts run in parallel and the best one (lowest index on
//! ties) is reported, so results do not depend on the thread count.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{QuantumChannel, RelayChannel};
use crate::labels::{A, A1, D};
use crate::linalg::{PureState, SubsystemShape};
use crate::random::rng_from_seed;
use crate::rates::{RateEvaluator, RateReport};
use crate::{CVector, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Dimension of `A1`; `None` means `|A|·|D|`, enough to purify any input.
    pub a1_dim: Option<usize>,
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            a1_dim: None,
            restarts: 16,
            max_evals: 5000,
            convergence_tol: 1e-6,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Parameter("restarts must be >= 1".into()));
        }
        if self.max_evals == 0 {
            return Err(Error::Parameter("max_evals must be >= 1".into()));
        }
        if !(self.convergence_tol > 0.0) || !self.convergence_tol.is_finite() {
            return Err(Error::Parameter(format!(
                "convergence_tol = {} must be positive",
                self.convergence_tol
            )));
        }
        if self.a1_dim == Some(0) {
            return Err(Error::Parameter("a1_dim must be >= 1".into()));
        }
        Ok(())
    }
}

/// Quantity to maximize. Values are unclipped so the search sees gradients
/// below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `min{I(A1⟩B), I(A1⟩E)}`
    DecodeForward,
    /// `½I(A1;B) − ½I(A1;D)`
    EntanglementAssisted,
    /// `I(A1⟩B)` alone.
    DestinationCoherent,
}

impl Objective {
    pub fn value(&self, report: &RateReport) -> f64 {
        match self {
            Objective::DecodeForward => report.df_objective(),
            Objective::EntanglementAssisted => report.ea_objective(),
            Objective::DestinationCoherent => report.coh_a1_b,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    #[serde(skip)]
    pub best_state: PureState,
    pub best_report: RateReport,
    /// Unclipped objective at `best_state`.
    pub objective_value: f64,
    /// Evaluations summed over all restarts.
    pub evals_used: usize,
    /// Whether the winning restart met the tolerance before its budget ran out.
    pub converged: bool,
    pub best_restart: usize,
}

/// Shape `[A1, A, D]` of the search space.
pub fn input_shape(relay: &RelayChannel, a1_dim: Option<usize>) -> Result<SubsystemShape> {
    let [da, dd] = relay.input_dims();
    SubsystemShape::new([(A1, a1_dim.unwrap_or(da * dd)), (A, da), (D, dd)])
}

/// Normalize interleaved `(re, im)` amplitudes into a state of `shape`.
pub fn params_to_state(params: &[f64], shape: &SubsystemShape) -> Result<PureState> {
    let n = shape.total_dim();
    if params.len() != 2 * n {
        return Err(Error::Shape(format!(
            "{} parameters for a state of dimension {n}, expected {}",
            params.len(),
            2 * n
        )));
    }
    let v = CVector::from_iterator(n, params.chunks_exact(2).map(|c| C64::new(c[0], c[1])));
    let norm = v.norm();
    if !(norm >= 1e-12) {
        return Err(Error::DegenerateParameters(format!(
            "parameter vector has norm {norm:.3e}"
        )));
    }
    PureState::normalized(v, shape.clone())
}

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    evals: usize,
    converged: bool,
}

/// Minimizes `f` from `x0`. Returns `(x, f(x), evals, converged)`.
///
/// After each convergence the simplex is rebuilt around the best vertex; the
/// run counts as converged once a rebuild gains less than `tol`.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize, bool) {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evals);
    let mut scale = step;
    let mut converged = false;

    'outer: while evals < max_evals {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            if evals >= max_evals {
                break 'outer;
            }
            let mut x = best_x.clone();
            x[i] += scale;
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }
        let start_f = best_f;

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            if spread <= tol || evals >= max_evals {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(alpha * beta);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = along(alpha * gamma);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-gamma);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < fr.min(worst.1) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        if evals >= max_evals {
                            break;
                        }
                        let x: Vec<f64> =
                            x0.iter().zip(&v.0).map(|(a, b)| a + delta * (b - a)).collect();
                        let fx = eval(&x, &mut evals);
                        *v = (x, fx);
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_f = simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        let spread = simplex[n].1 - simplex[0].1;
        if spread > tol {
            // budget ran out mid-descent
            break;
        }
        if start_f - best_f < tol && scale < step {
            converged = true;
            break;
        }
        scale = (scale * 0.25).max(1e-4);
    }
    (best_x, best_f, evals, converged)
}

fn run_restart(
    evaluator: &RateEvaluator,
    objective: Objective,
    shape: &SubsystemShape,
    cfg: &OptimizerConfig,
    restart: usize,
) -> RestartOutcome {
    let mut rng = rng_from_seed(cfg.seed ^ restart as u64);
    let x0: Vec<f64> = (0..2 * shape.total_dim())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let loss = |x: &[f64]| -> f64 {
        match params_to_state(x, shape) {
            Ok(s) => evaluator
                .evaluate(&s)
                .map(|r| -objective.value(&r))
                .unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let step = 0.5 * norm / (x0.len() as f64).sqrt();
    let (params, f, evals, converged) =
        nelder_mead(loss, &x0, step.max(1e-3), cfg.convergence_tol, cfg.max_evals);
    RestartOutcome {
        params,
        value: -f,
        evals,
        converged,
    }
}

/// Maximize `objective` over pure inputs on `[A1, A, D]`.
pub fn maximize(
    objective: Objective,
    relay: &RelayChannel,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let shape = input_shape(relay, cfg.a1_dim)?;
    let evaluator = RateEvaluator::new(relay)?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&evaluator, objective, &shape, cfg, r))
        .collect();

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let winner = &outcomes[best];
    if !winner.value.is_finite() {
        return Err(Error::NumericDomain(
            "no restart produced a finite objective".into(),
        ));
    }
    let best_state = params_to_state(&winner.params, &shape)?;
    let best_report = evaluator.evaluate(&best_state)?;
    Ok(OptimizationResult {
        objective_value: objective.value(&best_report),
        best_state,
        best_report,
        evals_used: outcomes.iter().map(|o| o.evals).sum(),
        converged: winner.converged,
        best_restart: best,
    })
}

/// Single-letter coherent information `max_ρ I(A1⟩Y)` of a point-to-point
/// channel. Clipped at 0, which any pure input attains. `a1_dim` defaults to
/// the channel's input dimension.
pub fn channel_coherent_information(ch: &QuantumChannel, cfg: &OptimizerConfig) -> Result<f64> {
    let (din, dout) = (ch.input_dim(), ch.output_dim());
    let relay = RelayChannel::from_kraus(ch.kraus().to_vec(), [din, 1], [dout, 1])?;
    let cfg = OptimizerConfig {
        a1_dim: Some(cfg.a1_dim.unwrap_or(din)),
        ..*cfg
    };
    Ok(maximize(Objective::DestinationCoherent, &relay, &cfg)?
        .objective_value
        .max(0.0))
}
