//! Acceptance suite. Run with
//! `cargo test -p qrelay --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use qrelay_core::channels::{make_channel, swap_unitary, ChannelKind, QuantumChannel, RelayChannel};
use qrelay_core::entropy::{
    binary_entropy, coherent_information, conditional_entropy, marginal_entropy, von_neumann_entropy,
};
use qrelay_core::fqsw::{decoupled_state, ghz_state, monte_carlo, random_abc_state, DecouplingConfig};
use qrelay_core::labels::{A, A1, B, D, E};
use qrelay_core::linalg::{PureState, SubsystemShape};
use qrelay_core::optimize::{channel_coherent_information, maximize, Objective, OptimizerConfig};
use qrelay_core::random::{random_channel, random_pure_state, rng_from_seed};
use qrelay_core::rates::{
    check_rate_point, decoupling_exponents, evaluate_state_rates, superdense_classical_rate,
    RatePoint, RateReport,
};
use qrelay_core::CMatrix;

type Outcome = Result<String, String>;

fn shape(entries: &[(&str, usize)]) -> SubsystemShape {
    SubsystemShape::new(entries.iter().copied()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn random_relay(seed: u64, da: usize, dd: usize, db: usize, de: usize) -> RelayChannel {
    let mut rng = rng_from_seed(seed);
    let k = (da * dd).div_ceil(db * de).max(2);
    let ch = random_channel(shape(&[(A, da), (D, dd)]), shape(&[(B, db), (E, de)]), k, &mut rng)
        .unwrap();
    RelayChannel::new(ch).unwrap()
}

fn qubit(kind: ChannelKind) -> QuantumChannel {
    make_channel(kind).unwrap()
}

fn hashing(p: f64) -> f64 {
    let q = 0.75 * p;
    1.0 - binary_entropy(q) - q * 3f64.log2()
}

// ---------------------------------------------------------------------------

fn entropic_identities() -> Outcome {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    for i in 0..200u64 {
        let (d1, da, dd) = (2 + (i % 3) as usize, 2 + (i / 3 % 3) as usize, 2 + (i / 9 % 3) as usize);
        let mut rng = rng_from_seed(10_000 + i);
        let sigma = random_pure_state(shape(&[(A1, d1), (A, da), (D, dd)]), &mut rng).to_density();
        let h = |labels: &[&str]| marginal_entropy(&sigma, labels).unwrap();

        for (labels, d) in [
            (&[A1][..], d1),
            (&[A][..], da),
            (&[D][..], dd),
            (&[A1, A][..], d1 * da),
            (&[A, D][..], da * dd),
        ] {
            let s = h(labels);
            ensure(s >= -TOL && s <= (d as f64).log2() + TOL, || {
                format!("state {i}: H({labels:?}) = {s} outside [0, log {d}]")
            })?;
        }
        ensure(von_neumann_entropy(&sigma).abs() < TOL, || format!("state {i}: not pure"))?;

        let rho_1 = sigma.partial_trace(&[A1]).unwrap();
        let rho_d = sigma.partial_trace(&[D]).unwrap();
        let product = von_neumann_entropy(&rho_1.tensor(&rho_d).unwrap());
        ensure((product - h(&[A1]) - h(&[D])).abs() < TOL, || {
            format!("state {i}: additivity off by {}", product - h(&[A1]) - h(&[D]))
        })?;

        ensure((h(&[A1]) - h(&[A, D])).abs() < TOL, || format!("state {i}: Schmidt symmetry"))?;
        ensure((h(&[A1, A]) - h(&[D])).abs() < TOL, || format!("state {i}: Schmidt symmetry"))?;

        let cond = conditional_entropy(&sigma, &[A1], &[D]).unwrap();
        let coh_a = coherent_information(&sigma, &[A1], &[A]).unwrap();
        ensure((cond - coh_a).abs() < TOL, || format!("state {i}: duality {cond} vs {coh_a}"))?;

        let link = random_channel(shape(&[(A, da)]), shape(&[(B, 2)]), 2, &mut rng).unwrap();
        let omega = link.apply(&sigma, &[A]).unwrap();
        let coh_b = coherent_information(&omega, &[A1], &[B]).unwrap();
        ensure(coh_a >= coh_b - TOL, || format!("state {i}: data processing {coh_a} < {coh_b}"))?;
    }
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!("200 states, {:.2?}", start.elapsed()))
}

fn fqsw_verification() -> Outcome {
    let start = Instant::now();
    // (name, ψ_ABC, |A1|, |A2|)
    let configs: Vec<(&str, PureState, usize, usize)> = vec![
        ("decoupled |A|=4 |C|=2", decoupled_state(4, 2).unwrap(), 2, 2),
        ("haar |A|=4 |C|=2", random_abc_state(4, 2, 2, 11).unwrap(), 2, 2),
        ("haar |A|=8 |C|=4", random_abc_state(8, 2, 4, 12).unwrap(), 2, 4),
        ("ghz |A|=4 |C|=4", ghz_state(4).unwrap(), 2, 2),
        ("haar |A|=8 |C|=2", random_abc_state(8, 3, 2, 13).unwrap(), 4, 2),
    ];
    let mut notes = Vec::new();
    for (i, (name, psi, a1, a2)) in configs.into_iter().enumerate() {
        let cfg = DecouplingConfig::new(psi, a1, a2, 1000, 500 + i as u64).map_err(|e| e.to_string())?;
        let res = monte_carlo(&cfg);
        ensure(res.trials.len() >= 1000, || format!("{name}: {} trials", res.trials.len()))?;
        let limit = res.rhs_bound + 3.0 * res.lhs_stderr;
        ensure(res.lhs_mean <= limit && res.bound_satisfied, || {
            format!("{name}: mean {} > bound {} + 3·{}", res.lhs_mean, res.rhs_bound, res.lhs_stderr)
        })?;
        if i == 0 {
            ensure(res.lhs_mean < 1e-10, || format!("{name}: mean {}", res.lhs_mean))?;
        }
        notes.push(format!("{name}: {:.3e} <= {:.3e}", res.lhs_mean, res.rhs_bound));
    }
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!("{}; {:.2?}", notes.join("; "), start.elapsed()))
}

fn unassisted_reduction() -> Outcome {
    let mut feasible = 0;
    for i in 0..100u64 {
        let (da, dd) = (2 + (i % 2) as usize, 2);
        let relay = random_relay(20_000 + i, da, dd, 2, 2);
        let d1 = 1 + (i % 4) as usize;
        let sigma = random_pure_state(shape(&[(A1, d1), (A, da), (D, dd)]), &mut rng_from_seed(30_000 + i));
        let r = evaluate_state_rates(&relay, &sigma).map_err(|e| e.to_string())?;
        let q = 0.02 * (i % 50) as f64;
        let e = decoupling_exponents(&r, &RatePoint::unassisted(q), 0.0).map_err(|e| e.to_string())?;
        let expected = q < r.coh_a1_b.min(r.coh_a1_e);
        ensure(e.all_feasible() == expected, || {
            format!("instance {i}: exponents {:?} vs Q < min = {expected} ({r:?})", e.feasible())
        })?;
        feasible += usize::from(expected);
    }
    Ok(format!("100 triples agree ({feasible} feasible)"))
}

fn direct_and_product_recoveries() -> Outcome {
    let mut rng = rng_from_seed(40);
    let mut worst = 0f64;
    for i in 0..20u64 {
        let relay = random_relay(41_000 + i, 2, 2, 2, 2);
        let phi = PureState::maximally_entangled(A1, A, 2).unwrap();
        let psi_d = random_pure_state(shape(&[(D, 2)]), &mut rng);
        let r = evaluate_state_rates(&relay, &phi.tensor(&psi_d).unwrap()).map_err(|e| e.to_string())?;
        let induced = relay.induced_direct_channel(&psi_d).map_err(|e| e.to_string())?;
        let omega = induced.apply(&phi.to_density(), &[A]).unwrap();
        let direct = coherent_information(&omega, &[A1], &[B]).unwrap();
        worst = worst.max((r.coh_a1_b - direct).abs());
        ensure((r.coh_a1_b - direct).abs() < 1e-8, || {
            format!("channel {i}: B-branch {} vs direct {direct}", r.coh_a1_b)
        })?;

        let psi_a = random_pure_state(shape(&[(A, 2)]), &mut rng);
        let xi = random_pure_state(shape(&[(A1, 2), (D, 2)]), &mut rng);
        let sigma = psi_a.tensor(&xi).unwrap().permute(&[A1, A, D]).unwrap();
        let r = evaluate_state_rates(&relay, &sigma).map_err(|e| e.to_string())?;
        ensure(r.h_a1_given_d <= 1e-9, || format!("channel {i}: H(A1|D) = {}", r.h_a1_given_d))?;
        for q in [1e-6, 0.01, 0.1, 0.5, 1.0] {
            for (lb, lbh) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (1.0, 0.25), (0.25, 1.0)] {
                let pt = RatePoint::new(q, lb, lbh, 0.0, 0.0).unwrap();
                ensure(!check_rate_point(&r, &pt).feasible, || {
                    format!("channel {i}: feasible at Q={q} L_B={lb} L̂_B={lbh}")
                })?;
            }
        }
    }
    Ok(format!("direct-link deviation {worst:.1e}; product inputs infeasible"))
}

fn closed_form_oracles() -> Outcome {
    let start = Instant::now();
    let cfg = OptimizerConfig {
        restarts: 4,
        seed: 5,
        ..OptimizerConfig::default()
    };
    let mut notes = Vec::new();
    for p in [0.0, 0.1, 0.25, 0.4] {
        let ic = channel_coherent_information(&qubit(ChannelKind::Erasure { d: 2, p }), &cfg)
            .map_err(|e| e.to_string())?;
        ensure((ic - (1.0 - 2.0 * p)).abs() < 1e-3, || format!("erasure p={p}: {ic}"))?;
        notes.push(format!("erasure({p}) {ic:.6}"));
    }
    for p in [0.05, 0.1] {
        let ic = channel_coherent_information(&qubit(ChannelKind::Depolarizing { d: 2, p }), &cfg)
            .map_err(|e| e.to_string())?;
        ensure((ic - hashing(p)).abs() < 1e-3, || {
            format!("depolarizing p={p}: {ic} vs {}", hashing(p))
        })?;
        notes.push(format!("depolarizing({p}) {ic:.6}"));
    }
    within_budget(start, Duration::from_secs(120))?;
    Ok(format!("{}; {:.2?}", notes.join(", "), start.elapsed()))
}

fn ea_noiseless_optimum() -> Outcome {
    let id = qubit(ChannelKind::Identity { d: 2 });
    let cfg = OptimizerConfig {
        restarts: 4,
        seed: 6,
        ..OptimizerConfig::default()
    };
    // A reaches B untouched and D reaches E untouched
    let noiseless = RelayChannel::interaction(&CMatrix::identity(4, 4), &id, &id).unwrap();
    let res = maximize(Objective::EntanglementAssisted, &noiseless, &cfg).map_err(|e| e.to_string())?;
    let sd = superdense_classical_rate(&res.best_report);

    // the exchange interaction routes D to B, which makes the functional vanish
    let exchange = RelayChannel::interaction(&swap_unitary(2), &id, &id).unwrap();
    let swapped = maximize(Objective::EntanglementAssisted, &exchange, &cfg).map_err(|e| e.to_string())?;

    ensure(res.objective_value >= 1.0 - 1e-3, || format!("objective {}", res.objective_value))?;
    ensure(sd >= 2.0 - 2e-3, || format!("superdense rate {sd}"))?;
    Ok(format!(
        "objective {:.6}, superdense {sd:.6} (exchange interaction: {:.2e})",
        res.objective_value, swapped.objective_value
    ))
}

fn run_binary(config: &Path, out: &Path) -> Result<Vec<u8>, String> {
    let status = Process::new(env!("CARGO_BIN_EXE_qrelay"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let depol = r#"{"relay": "direct", "link": {"kind": "depolarizing", "params": {"p": 0.1}}}"#;
    let configs = [
        ("rates", format!(r#"{{"command": "rates", "seed": 1, "channel": {depol}, "state": "random"}}"#)),
        ("optimize", format!(
            r#"{{"command": "optimize", "seed": 1, "channel": {depol},
                "optimizer": {{"objective": "ea_df", "restarts": 4, "max_evals": 600}}}}"#
        )),
        ("feasible", format!(
            r#"{{"command": "feasible", "seed": 1, "channel": {depol}, "state": "random",
                "rate_point": {{"Q": 0.1, "L_B": 0.2, "L_B_hat": 0.1}}}}"#
        )),
        ("sweep", format!(
            r#"{{"command": "sweep", "seed": 1, "channel": {depol}, "state": "random",
                "sweep": {{"param": "channel.link.params.p", "start": 0.0, "stop": 1.0, "steps": 5}}}}"#
        )),
        ("fqsw", r#"{"command": "fqsw", "seed": 1, "fqsw": {"state": "random", "trials": 200}}"#.to_string()),
    ];
    for (name, text) in &configs {
        let cfg = dir.path().join(format!("{name}.json"));
        std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let first = dir.path().join(format!("{name}-1.out"));
        let second = dir.path().join(format!("{name}-2.out"));
        let a = run_binary(&cfg, &first)?;
        let b = run_binary(&cfg, &second)?;
        ensure(!a.is_empty() && a == b, || format!("{name}: outputs differ"))?;
        if *name == "fqsw" {
            let ta = std::fs::read(dir.path().join("fqsw-1.trials.csv")).map_err(|e| e.to_string())?;
            let tb = std::fs::read(dir.path().join("fqsw-2.trials.csv")).map_err(|e| e.to_string())?;
            ensure(ta == tb, || "fqsw: trial CSVs differ".into())?;
        }
    }
    Ok("rates, optimize, feasible, sweep, fqsw byte-identical".into())
}

fn slack_linearity() -> Outcome {
    const STEP: f64 = 0.25;
    let reports = [
        RateReport::from_quantities(1.5, 0.75, 1.25, 2.0, 0.5),
        RateReport::from_quantities(-0.5, -1.0, 0.25, 0.75, 1.0),
        RateReport::from_quantities(2.0, 1.5, -0.75, 0.5, 0.0),
    ];
    let expected = [[-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    for r in &reports {
        for (q, lb, lbh) in [(0.0, 0.0, 0.0), (0.5, 0.25, 0.75), (1.25, 1.0, 0.5)] {
            let at = |lb: f64, lbh: f64| check_rate_point(r, &RatePoint::new(q, lb, lbh, 0.0, 0.0).unwrap()).slacks();
            let base = at(lb, lbh);
            let d_lb = at(lb + STEP, lbh);
            let d_lbh = at(lb, lbh + STEP);
            for k in 0..3 {
                let got = [(d_lb[k] - base[k]) / STEP, (d_lbh[k] - base[k]) / STEP];
                ensure(got == expected[k], || {
                    format!("slack {}: coefficients {got:?}, expected {:?}", k + 1, expected[k])
                })?;
            }
        }
    }
    Ok("coefficients (-1,+1), (-1,-1), (+1,-1) exact".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("entropic identities", entropic_identities),
        ("FQSW decoupling bound", fqsw_verification),
        ("unassisted exponent reduction", unassisted_reduction),
        ("direct and product recoveries", direct_and_product_recoveries),
        ("closed-form coherent information", closed_form_oracles),
        ("EA noiseless optimum", ea_noiseless_optimum),
        ("CLI determinism", cli_determinism),
        ("slack linearity", slack_linearity),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", n + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name}: {why}", n + 1);
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
