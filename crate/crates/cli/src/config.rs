//! Run configuration: a JSON document, optionally patched by command-line
//! overrides.

use std::path::{Path, PathBuf};

use qrelay_core::channels::{ChannelSpec, RelaySpec, UnitarySpec};
use qrelay_core::fqsw::{decoupled_state, ghz_state, random_abc_state, DecouplingConfig};
use qrelay_core::labels::{A, A1, D};
use qrelay_core::linalg::{PureState, SubsystemShape};
use qrelay_core::optimize::{Objective, OptimizerConfig};
use qrelay_core::random::{random_pure_state, rng_from_seed};
use qrelay_core::rates::{RatePoint, RateReport};
use qrelay_core::{CVector, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Rates,
    Optimize,
    Feasible,
    Sweep,
    Fqsw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ObjectiveName {
    #[default]
    #[serde(rename = "df")]
    Df,
    #[serde(rename = "ea_df")]
    EaDf,
}

impl ObjectiveName {
    pub fn objective(self) -> Objective {
        match self {
            ObjectiveName::Df => Objective::DecodeForward,
            ObjectiveName::EaDf => Objective::EntanglementAssisted,
        }
    }
}

/// Input state `σ` on `[A1, A, D]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// `"maxent_a1a"`: `Φ_{A1 A} ⊗ |0⟩_D`; `"product"`: `|0⟩_A ⊗ Φ_{A1 D}`;
    /// `"random"`: Haar-random with the run seed.
    Named(String),
    Random { random: u64 },
    Explicit {
        amplitudes: Vec<[f64; 2]>,
        dims: [usize; 3],
    },
}

/// Decoupling input `ψ` on `[A, B, C]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FqswStateSpec {
    /// `"decoupled"`, `"ghz"` or `"random"` (run seed).
    Named(String),
    Random { random: u64 },
    Explicit { amplitudes: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FqswSpec {
    #[serde(default = "default_fqsw_state")]
    pub state: FqswStateSpec,
    /// `[|A|, |B|, |C|]`; defaults to `[4, 4, 2]` for `decoupled`, `[4, 4, 4]`
    /// for `ghz` and `[4, 2, 2]` otherwise.
    #[serde(default)]
    pub dims: Option<[usize; 3]>,
    #[serde(default)]
    pub a1_dim: Option<usize>,
    #[serde(default)]
    pub a2_dim: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_fqsw_state() -> FqswStateSpec {
    FqswStateSpec::Named("random".into())
}

fn default_trials() -> usize {
    1000
}

impl Default for FqswSpec {
    fn default() -> Self {
        Self {
            state: default_fqsw_state(),
            dims: None,
            a1_dim: None,
            a2_dim: None,
            trials: default_trials(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path into the configuration, e.g. `channel.link.params.p`.
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Optimizer settings; the seed comes from the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    pub objective: ObjectiveName,
    pub a1_dim: Option<usize>,
    pub restarts: usize,
    pub max_evals: usize,
    pub convergence_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            objective: ObjectiveName::Df,
            a1_dim: d.a1_dim,
            restarts: d.restarts,
            max_evals: d.max_evals,
            convergence_tol: d.convergence_tol,
        }
    }
}

impl OptimizerSettings {
    pub fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            a1_dim: self.a1_dim,
            restarts: self.restarts,
            max_evals: self.max_evals,
            convergence_tol: self.convergence_tol,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<RelaySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Precomputed report for `feasible`, e.g. the output of `rates`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_point: Option<RatePoint>,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub fqsw: FqswSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Per-trial CSV for `fqsw`; defaults to `<output stem>.trials.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials_output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn trials_path(&self) -> Option<PathBuf> {
        if let Some(p) = &self.trials_output {
            return Some(p.clone());
        }
        let out = self.output.as_ref()?;
        let stem = out.file_stem()?.to_string_lossy().into_owned();
        Some(out.with_file_name(format!("{stem}.trials.csv")))
    }

    /// Copy of the configuration with the value at a dotted path replaced.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self, CliError> {
        let mut doc = serde_json::to_value(self)
            .map_err(|e| CliError::Config(format!("config: {e}")))?;
        let keys: Vec<&str> = path.split('.').collect();
        let (last, parents) = keys
            .split_last()
            .filter(|(l, _)| !l.is_empty())
            .ok_or_else(|| CliError::Config(format!("empty sweep parameter {path:?}")))?;
        let mut node = &mut doc;
        for key in parents {
            node = node
                .get_mut(*key)
                .filter(|n| n.is_object())
                .ok_or_else(|| CliError::Config(format!("sweep parameter {path:?}: no object at {key:?}")))?;
        }
        node.as_object_mut()
            .expect("checked above")
            .insert(last.to_string(), Value::from(value));
        serde_json::from_value(doc)
            .map_err(|e| CliError::Config(format!("sweep parameter {path:?}: {e}")))
    }
}

fn named(kind: &str, params: &[(&str, f64)]) -> ChannelSpec {
    ChannelSpec::named(kind, params)
}

/// Relay channels selectable by name on the command line.
pub const PRESETS: &[&str] = &[
    "noiseless",
    "depolarizing",
    "erasure",
    "dephasing",
    "amplitude_damping",
    "swap",
    "orthogonal",
];

/// A preset relay. Single-link presets carry `A -> B` with the relay input
/// passing to `E`; `orthogonal` uses depolarizing links `A -> E`, `D -> B`.
pub fn preset(name: &str, p: f64) -> Result<RelaySpec, CliError> {
    let direct = |link| RelaySpec::Direct { link, relay_dim: 2 };
    Ok(match name {
        "noiseless" => direct(named("identity", &[])),
        "depolarizing" => direct(named("depolarizing", &[("p", p)])),
        "erasure" => direct(named("erasure", &[("p", p)])),
        "dephasing" => direct(named("dephasing", &[("p", p)])),
        "amplitude_damping" => direct(named("amplitude_damping", &[("gamma", p)])),
        "swap" => RelaySpec::Interaction {
            unitary: UnitarySpec::Named("swap".into()),
            noise_b: named("identity", &[]),
            noise_e: named("identity", &[]),
        },
        "orthogonal" => RelaySpec::Orthogonal {
            p: named("depolarizing", &[("p", p)]),
            m: named("depolarizing", &[("p", p)]),
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown channel {other:?} (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Set the noise parameter of every named component that has one.
fn set_noise_parameter(spec: &mut RelaySpec, p: f64) {
    let patch = |c: &mut ChannelSpec| {
        if let ChannelSpec::Named { kind, params } = c {
            let key = if kind == "amplitude_damping" { "gamma" } else { "p" };
            if kind != "identity" {
                params.insert(key.to_string(), p);
            }
        }
    };
    match spec {
        RelaySpec::Direct { link, .. } => patch(link),
        RelaySpec::Orthogonal { p: a, m } => {
            patch(a);
            patch(m);
        }
        RelaySpec::Interaction {
            noise_b, noise_e, ..
        } => {
            patch(noise_b);
            patch(noise_e);
        }
        RelaySpec::Kraus { .. } => {}
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub channel: Option<String>,
    pub p: Option<f64>,
    pub state: Option<String>,
    pub trials: Option<usize>,
    pub restarts: Option<usize>,
    pub a1_dim: Option<usize>,
    pub delta: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig, CliError> {
        if let Some(c) = self.command {
            cfg.command = Some(c);
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(name) = &self.channel {
            cfg.channel = Some(preset(name, self.p.unwrap_or(0.0))?);
        } else if let Some(p) = self.p {
            let spec = cfg.channel.as_mut().ok_or_else(|| {
                CliError::Config("--p needs a channel (--channel or config)".into())
            })?;
            set_noise_parameter(spec, p);
        }
        if let Some(state) = &self.state {
            if cfg.command == Some(Command::Fqsw) {
                cfg.fqsw.state = FqswStateSpec::Named(state.clone());
            } else {
                cfg.state = Some(StateSpec::Named(state.clone()));
            }
        }
        if let Some(t) = self.trials {
            cfg.fqsw.trials = t;
        }
        if let Some(r) = self.restarts {
            cfg.optimizer.restarts = r;
        }
        if let Some(a1) = self.a1_dim {
            cfg.optimizer.a1_dim = Some(a1);
            cfg.fqsw.a1_dim = Some(a1);
            cfg.fqsw.a2_dim = None;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        Ok(cfg)
    }
}

fn amplitudes_to_vector(amps: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(amps.len(), amps.iter().map(|[re, im]| C64::new(*re, *im)))
}

/// Build `σ` for a channel with input dimensions `[|A|, |D|]`.
pub fn build_state(
    spec: &StateSpec,
    input_dims: [usize; 2],
    a1_dim: Option<usize>,
    seed: u64,
) -> Result<PureState, CliError> {
    let [da, dd] = input_dims;
    let random = |seed: u64| -> Result<PureState, CliError> {
        let shape = SubsystemShape::new([(A1, a1_dim.unwrap_or(da * dd)), (A, da), (D, dd)])?;
        Ok(random_pure_state(shape, &mut rng_from_seed(seed)))
    };
    match spec {
        StateSpec::Named(name) => match name.as_str() {
            "maxent_a1a" => {
                let phi = PureState::maximally_entangled(A1, A, da)?;
                let zero = PureState::basis(SubsystemShape::single(D, dd)?, 0)?;
                Ok(phi.tensor(&zero)?)
            }
            "product" => {
                let zero = PureState::basis(SubsystemShape::single(A, da)?, 0)?;
                let xi = PureState::maximally_entangled(A1, D, dd)?;
                Ok(zero.tensor(&xi)?.permute(&[A1, A, D])?)
            }
            "random" => random(seed),
            other => Err(CliError::Config(format!(
                "unknown state {other:?} (expected maxent_a1a, product, random)"
            ))),
        },
        StateSpec::Random { random: s } => random(*s),
        StateSpec::Explicit { amplitudes, dims } => {
            if dims[1] != da || dims[2] != dd {
                return Err(CliError::Config(format!(
                    "state dims {dims:?} do not match channel inputs [{da}, {dd}]"
                )));
            }
            let shape = SubsystemShape::new([(A1, dims[0]), (A, dims[1]), (D, dims[2])])?;
            if amplitudes.len() != shape.total_dim() {
                return Err(CliError::Config(format!(
                    "{} amplitudes for a state of dimension {}",
                    amplitudes.len(),
                    shape.total_dim()
                )));
            }
            Ok(PureState::normalized(amplitudes_to_vector(amplitudes), shape)?)
        }
    }
}

impl FqswSpec {
    pub fn resolved_dims(&self) -> [usize; 3] {
        self.dims.unwrap_or(match &self.state {
            FqswStateSpec::Named(n) if n == "decoupled" => [4, 4, 2],
            FqswStateSpec::Named(n) if n == "ghz" => [4, 4, 4],
            _ => [4, 2, 2],
        })
    }
}

pub fn build_decoupling(spec: &FqswSpec, seed: u64) -> Result<DecouplingConfig, CliError> {
    let dims = spec.resolved_dims();
    let [da, db, dc] = dims;
    let psi = match &spec.state {
        FqswStateSpec::Named(name) => match name.as_str() {
            "decoupled" if db == da => decoupled_state(da, dc)?,
            "decoupled" => {
                return Err(CliError::Config(format!(
                    "decoupled input needs |B| = |A|, got dims {dims:?}"
                )))
            }
            "ghz" if da == db && db == dc => ghz_state(da)?,
            "ghz" => {
                return Err(CliError::Config(format!(
                    "ghz input needs equal dims, got {dims:?}"
                )))
            }
            "random" => random_abc_state(da, db, dc, seed)?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown fqsw state {other:?} (expected decoupled, ghz, random)"
                )))
            }
        },
        FqswStateSpec::Random { random } => random_abc_state(da, db, dc, *random)?,
        FqswStateSpec::Explicit { amplitudes } => {
            let shape = SubsystemShape::new([("A", da), ("B", db), ("C", dc)])?;
            if amplitudes.len() != shape.total_dim() {
                return Err(CliError::Config(format!(
                    "{} amplitudes for a state of dimension {}",
                    amplitudes.len(),
                    shape.total_dim()
                )));
            }
            PureState::normalized(amplitudes_to_vector(amplitudes), shape)?
        }
    };
    let (a1, a2) = match (spec.a1_dim, spec.a2_dim) {
        (Some(a1), Some(a2)) => (a1, a2),
        (Some(a1), None) if a1 > 0 && da % a1 == 0 => (a1, da / a1),
        (None, Some(a2)) if a2 > 0 && da % a2 == 0 => (da / a2, a2),
        (None, None) => {
            // split A as evenly as its factors allow, A1 the smaller half
            let mut a1 = (da as f64).sqrt().floor() as usize;
            while a1 > 1 && da % a1 != 0 {
                a1 -= 1;
            }
            (a1.max(1), da / a1.max(1))
        }
        (a1, a2) => {
            return Err(CliError::Config(format!(
                "split a1_dim = {a1:?}, a2_dim = {a2:?} does not factor |A| = {da}"
            )))
        }
    };
    Ok(DecouplingConfig::new(psi, a1, a2, spec.trials, seed)?)
}
