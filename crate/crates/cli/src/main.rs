use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qrelay::config::PRESETS;
use qrelay::{run, validate, Command, Overrides, RunConfig, EXIT_CONFIG};

/// Decode-forward rates for quantum relay channels.
#[derive(Debug, Parser)]
#[command(name = "qrelay", version)]
struct Args {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Preset relay channel.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    channel: Option<String>,
    /// Noise parameter of the channel's named links.
    #[arg(long)]
    p: Option<f64>,
    /// Named input state (maxent_a1a, product, random; for fqsw:
    /// decoupled, ghz, random).
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long = "a1-dim")]
    a1_dim: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Validate the configuration and exit without running it.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        command: args.command,
        out: args.out,
        seed: args.seed,
        channel: args.channel,
        p: args.p,
        state: args.state,
        trials: args.trials,
        restarts: args.restarts,
        a1_dim: args.a1_dim,
        delta: args.delta,
    };
    let cfg = match args.config.as_deref().map(RunConfig::load).transpose() {
        Ok(base) => overrides.apply(base.unwrap_or_default()),
        Err(e) => Err(e),
    };
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.check {
        let diags = validate(&cfg);
        for d in &diags {
            eprintln!("{d}");
        }
        return if diags.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_CONFIG as u8)
        };
    }
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
