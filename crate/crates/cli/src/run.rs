use std::fmt::Write as _;
use std::path::Path;

use qrelay_core::channels::{RelayChannel, RelaySpec, CHANNEL_TOL};
use qrelay_core::fqsw::{entanglement_byproduct, monte_carlo, trial_unitary, DecouplingResult, EntanglementByproduct};
use qrelay_core::optimize::maximize;
use qrelay_core::rates::{
    check_rate_point, decoupling_exponents, evaluate_state_rates, superdense_classical_rate,
    DecouplingExponents, Feasibility, RatePoint, RateReport,
};
use serde::Serialize;

use crate::config::{build_decoupling, build_state, Command, ObjectiveName, RunConfig, StateSpec};
use crate::CliError;

/// Rendered outputs of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// JSON document, or CSV for `sweep`.
    pub main: String,
    /// Per-trial CSV for `fqsw`.
    pub trials_csv: Option<String>,
}

const SWEEP_HEADER: &str =
    "param_value,h_a1_given_d,coh_a1_E,coh_a1_B,mi_a1_B,mi_a1_D,q_df,q_ea_df";

/// CSV number: 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn require<'a, T>(value: &'a Option<T>, what: &str, cmd: Command) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("command {cmd:?} needs `{what}`").to_lowercase()))
}

fn command(cfg: &RunConfig) -> Result<Command, CliError> {
    cfg.command
        .ok_or_else(|| CliError::Config("no command given (--command or `command`)".into()))
}

fn build_channel(spec: &RelaySpec) -> Result<RelayChannel, CliError> {
    Ok(spec.build()?)
}

fn rate_point(cfg: &RunConfig, cmd: Command) -> Result<RatePoint, CliError> {
    let pt = *require(&cfg.rate_point, "rate_point", cmd)?;
    pt.validate()?;
    Ok(pt)
}

fn report_for(cfg: &RunConfig, cmd: Command) -> Result<RateReport, CliError> {
    let channel = build_channel(require(&cfg.channel, "channel", cmd)?)?;
    let state = build_state(
        require(&cfg.state, "state", cmd)?,
        channel.input_dims(),
        cfg.optimizer.a1_dim,
        cfg.seed,
    )?;
    Ok(evaluate_state_rates(&channel, &state)?)
}

#[derive(Serialize)]
struct StateRecord {
    labels: Vec<String>,
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct OptimizeRecord {
    objective: ObjectiveName,
    objective_value: f64,
    rate: f64,
    evals_used: usize,
    converged: bool,
    best_restart: usize,
    report: RateReport,
    state: StateRecord,
}

#[derive(Serialize)]
struct FeasibleRecord {
    report: RateReport,
    rate_point: RatePoint,
    region: Feasibility,
    exponents: DecouplingExponents,
    superdense_classical_rate: f64,
}

#[derive(Serialize)]
struct FqswRecord {
    dims: [usize; 3],
    a1_dim: usize,
    a2_dim: usize,
    seed: u64,
    #[serde(flatten)]
    result: DecouplingResult,
    /// `1 − 2√lhs_min`, the fidelity the best trial guarantees.
    fidelity_floor: f64,
    byproduct: EntanglementByproduct,
}

fn run_rates(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    Ok(RunOutput {
        main: to_json(&report_for(cfg, Command::Rates)?),
        trials_csv: None,
    })
}

fn run_optimize(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let channel = build_channel(require(&cfg.channel, "channel", Command::Optimize)?)?;
    let objective = cfg.optimizer.objective;
    let res = maximize(objective.objective(), &channel, &cfg.optimizer.config(cfg.seed))?;
    let shape = res.best_state.shape();
    let record = OptimizeRecord {
        objective,
        objective_value: res.objective_value,
        rate: res.objective_value.max(0.0),
        evals_used: res.evals_used,
        converged: res.converged,
        best_restart: res.best_restart,
        report: res.best_report,
        state: StateRecord {
            labels: shape.labels().map(str::to_string).collect(),
            dims: shape.dims(),
            amplitudes: res.best_state.data().iter().map(|z| [z.re, z.im]).collect(),
        },
    };
    Ok(RunOutput {
        main: to_json(&record),
        trials_csv: None,
    })
}

fn run_feasible(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let pt = rate_point(cfg, Command::Feasible)?;
    let report = match &cfg.report {
        Some(r) => *r,
        None => report_for(cfg, Command::Feasible)?,
    };
    let record = FeasibleRecord {
        report,
        rate_point: pt,
        region: check_rate_point(&report, &pt),
        exponents: decoupling_exponents(&report, &pt, cfg.delta)?,
        superdense_classical_rate: superdense_classical_rate(&report),
    };
    Ok(RunOutput {
        main: to_json(&record),
        trials_csv: None,
    })
}

fn run_sweep(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sweep = require(&cfg.sweep, "sweep", Command::Sweep)?;
    if sweep.steps < 2 {
        return Err(CliError::Config(format!(
            "sweep needs at least 2 steps, got {}",
            sweep.steps
        )));
    }
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for value in sweep.values() {
        let point = cfg.with_param(&sweep.param, value)?;
        let r = report_for(&point, Command::Sweep)?;
        let fields = [
            value,
            r.h_a1_given_d,
            r.coh_a1_e,
            r.coh_a1_b,
            r.mi_a1_b,
            r.mi_a1_d,
            r.q_df,
            r.q_ea_df,
        ];
        let line: Vec<String> = fields.iter().map(|&x| num(x)).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    Ok(RunOutput {
        main: csv,
        trials_csv: None,
    })
}

fn run_fqsw(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let dc = build_decoupling(&cfg.fqsw, cfg.seed)?;
    let result = monte_carlo(&dc);
    let byproduct = entanglement_byproduct(&dc, &trial_unitary(&dc, result.best_trial))?;
    let mut csv = String::from("trial_index,lhs_value\n");
    for (i, v) in result.trials.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", num(*v));
    }
    let record = FqswRecord {
        dims: cfg.fqsw.resolved_dims(),
        a1_dim: dc.a1_dim(),
        a2_dim: dc.a2_dim(),
        seed: cfg.seed,
        fidelity_floor: 1.0 - 2.0 * result.lhs_min.sqrt(),
        result,
        byproduct,
    };
    Ok(RunOutput {
        main: to_json(&record),
        trials_csv: Some(csv),
    })
}

/// Run the configured command and render its outputs.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match command(cfg)? {
        Command::Rates => run_rates(cfg),
        Command::Optimize => run_optimize(cfg),
        Command::Feasible => run_feasible(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Fqsw => run_fqsw(cfg),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Execute and write outputs: the main document to `output` (or stdout),
/// the fqsw trial CSV next to it.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let out = execute(cfg)?;
    match &cfg.output {
        Some(path) => write_file(path, &out.main)?,
        None => print!("{}", out.main),
    }
    if let (Some(csv), Some(path)) = (&out.trials_csv, cfg.trials_path()) {
        write_file(&path, csv)?;
    }
    Ok(())
}

fn channel_diagnostics(spec: &RelaySpec, diags: &mut Vec<String>) -> Option<RelayChannel> {
    let mut defect = false;
    let mut check = |name: &str, residual: qrelay_core::Result<Option<f64>>| match residual {
        Ok(Some(r)) if !(r <= CHANNEL_TOL) => {
            diags.push(format!(
                "channel `{name}`: Kraus completeness violated by {r:.3e}"
            ));
            defect = true;
        }
        Ok(_) => {}
        Err(e) => {
            diags.push(format!("channel `{name}`: {e}"));
            defect = true;
        }
    };
    check("channel", spec.completeness_residual());
    for (name, component) in spec.components() {
        check(name, component.completeness_residual());
    }
    if defect {
        return None;
    }
    match spec.build() {
        Ok(ch) => Some(ch),
        Err(e) => {
            diags.push(format!("channel: {e}"));
            None
        }
    }
}

fn state_diagnostics(
    cfg: &RunConfig,
    state: &StateSpec,
    channel: &RelayChannel,
    diags: &mut Vec<String>,
) {
    if let Err(e) = build_state(state, channel.input_dims(), cfg.optimizer.a1_dim, cfg.seed) {
        diags.push(format!("state: {e}"));
    }
}

/// Check a configuration without running it. An empty list means runnable.
pub fn validate(cfg: &RunConfig) -> Vec<String> {
    let mut diags = Vec::new();
    let Some(cmd) = cfg.command else {
        diags.push("no command given (--command or `command`)".into());
        return diags;
    };
    let needs_channel = match cmd {
        Command::Rates | Command::Optimize | Command::Sweep => true,
        Command::Feasible => cfg.report.is_none(),
        Command::Fqsw => false,
    };
    let channel = match (&cfg.channel, needs_channel) {
        (Some(spec), true) => channel_diagnostics(spec, &mut diags),
        (None, true) => {
            diags.push("missing `channel`".into());
            None
        }
        _ => None,
    };
    let needs_state = matches!(cmd, Command::Rates | Command::Sweep) || (needs_channel && cmd == Command::Feasible);
    match (&cfg.state, &channel) {
        (Some(state), Some(ch)) if needs_state => state_diagnostics(cfg, state, ch, &mut diags),
        (None, _) if needs_state => diags.push("missing `state`".into()),
        _ => {}
    }
    if cmd == Command::Feasible {
        match &cfg.rate_point {
            Some(pt) => {
                if let Err(e) = pt.validate() {
                    diags.push(format!("rate_point: {e}"));
                }
            }
            None => diags.push("missing `rate_point`".into()),
        }
        if !(cfg.delta >= 0.0) || !cfg.delta.is_finite() {
            diags.push(format!("delta = {} must be >= 0", cfg.delta));
        }
    }
    if cmd == Command::Optimize {
        if let Err(e) = cfg.optimizer.config(cfg.seed).validate() {
            diags.push(format!("optimizer: {e}"));
        }
    }
    if cmd == Command::Sweep {
        match &cfg.sweep {
            Some(s) if s.steps < 2 => {
                diags.push(format!("sweep: steps = {} must be at least 2", s.steps))
            }
            Some(s) => {
                for value in [s.start, s.stop] {
                    let point = cfg.with_param(&s.param, value).and_then(|p| {
                        let spec = p.channel.as_ref().ok_or_else(|| {
                            CliError::Config("sweep removed the channel".into())
                        })?;
                        spec.build().map(|_| ()).map_err(CliError::from)
                    });
                    if let Err(e) = point {
                        diags.push(format!("sweep at {value}: {e}"));
                        break;
                    }
                }
            }
            None => diags.push("missing `sweep`".into()),
        }
    }
    if cmd == Command::Fqsw {
        if let Err(e) = build_decoupling(&cfg.fqsw, cfg.seed) {
            diags.push(format!("fqsw: {e}"));
        }
    }
    diags
}
