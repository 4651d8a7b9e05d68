use std::path::Path;
use std::process::Command as Process;

use qrelay::{execute, validate, RunConfig, EXIT_CONFIG, EXIT_NUMERIC};
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_qrelay");

fn config(doc: Value) -> RunConfig {
    RunConfig::from_json(&doc.to_string()).unwrap()
}

fn noiseless() -> Value {
    json!({"relay": "direct", "link": {"kind": "identity"}})
}

fn depolarizing(p: f64) -> Value {
    json!({"relay": "direct", "link": {"kind": "depolarizing", "params": {"p": p}}})
}

/// Identity on two qubits scaled so that `Σ K†K − I` has norm `defect`.
fn defective_kraus(defect: f64) -> Value {
    let s = (1.0 + defect).sqrt();
    let rows: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|i| (0..4).map(|j| [if i == j { s } else { 0.0 }, 0.0]).collect())
        .collect();
    json!({"relay": "kraus", "kraus": [rows], "input_dims": [2, 2], "output_dims": [2, 2]})
}

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn sweep_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write_config(dir: &Path, name: &str, doc: &Value) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

#[test]
fn rates_on_noiseless_link_give_unit_assisted_rate() {
    let cfg = config(json!({"command": "rates", "channel": noiseless(), "state": "maxent_a1a"}));
    let out = parse(&execute(&cfg).unwrap().main);
    assert!((out["q_ea_df"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((out["coh_a1_B"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(out["q_df"].as_f64().unwrap(), 0.0);
}

#[test]
fn depolarizing_sweep_is_monotone_and_full_precision() {
    let cfg = config(json!({
        "command": "sweep",
        "channel": depolarizing(0.0),
        "state": "maxent_a1a",
        "sweep": {"param": "channel.link.params.p", "start": 0.0, "stop": 1.0, "steps": 11}
    }));
    let csv = execute(&cfg).unwrap().main;
    assert_eq!(
        csv.lines().next().unwrap(),
        "param_value,h_a1_given_d,coh_a1_E,coh_a1_B,mi_a1_B,mi_a1_D,q_df,q_ea_df"
    );
    let rows = sweep_rows(&csv);
    assert_eq!(rows.len(), 11);
    let ea: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    for w in ea.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{ea:?}");
    }
    assert!((ea[0] - 1.0).abs() < 1e-9);
    assert!(ea[10].abs() < 1e-9);
    for row in &rows {
        for field in row {
            let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
            assert!(mantissa.len() >= 12, "{field}");
        }
    }
}

#[test]
fn decoupled_fqsw_input_has_zero_distance() {
    let cfg = config(json!({"command": "fqsw", "fqsw": {"state": "decoupled", "trials": 50}}));
    let out = execute(&cfg).unwrap();
    let doc = parse(&out.main);
    assert!(doc["lhs_mean"].as_f64().unwrap() < 1e-10);
    assert_eq!(doc["bound_satisfied"], Value::Bool(true));
    assert_eq!(doc["dims"], json!([4, 4, 2]));
    let trials = out.trials_csv.unwrap();
    assert_eq!(trials.lines().next().unwrap(), "trial_index,lhs_value");
    assert_eq!(trials.lines().count(), 51);
}

#[test]
fn random_fqsw_input_respects_bound() {
    let cfg = config(json!({
        "command": "fqsw",
        "seed": 4,
        "fqsw": {"state": "random", "dims": [8, 2, 4], "a1_dim": 2, "a2_dim": 4, "trials": 200}
    }));
    let doc = parse(&execute(&cfg).unwrap().main);
    assert_eq!(doc["bound_satisfied"], Value::Bool(true));
    assert_eq!(doc["trials"].as_array().unwrap().len(), 200);
}

#[test]
fn validate_accepts_a_runnable_config() {
    let cfg = config(json!({"command": "rates", "channel": depolarizing(0.2), "state": "random"}));
    assert!(validate(&cfg).is_empty());
}

#[test]
fn validate_reports_the_kraus_defect_once() {
    let cfg = config(json!({"command": "rates", "channel": defective_kraus(1e-3), "state": "random"}));
    let diags = validate(&cfg);
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert!(diags[0].contains("`channel`"), "{}", diags[0]);
    assert!(diags[0].contains("completeness"), "{}", diags[0]);
}

#[test]
fn validate_rejects_single_step_sweep() {
    let cfg = config(json!({
        "command": "sweep",
        "channel": depolarizing(0.0),
        "state": "maxent_a1a",
        "sweep": {"param": "channel.link.params.p", "start": 0.0, "stop": 1.0, "steps": 1}
    }));
    let diags = validate(&cfg);
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert!(diags[0].contains("steps"));
}

#[test]
fn feasible_reuses_a_serialized_report_exactly() {
    let base = json!({"command": "rates", "seed": 9, "channel": depolarizing(0.1), "state": "random"});
    let report_text = execute(&config(base.clone())).unwrap().main;
    let report = parse(&report_text);
    let pt = json!({"Q": 0.1, "L_B": 0.3, "L_B_hat": 0.2});

    let mut direct = base.clone();
    direct["command"] = json!("feasible");
    direct["rate_point"] = pt.clone();
    let from_channel = parse(&execute(&config(direct)).unwrap().main);

    let reused = json!({"command": "feasible", "report": report, "rate_point": pt});
    let from_report = parse(&execute(&config(reused)).unwrap().main);

    assert_eq!(from_channel["region"], from_report["region"]);
    assert_eq!(from_channel["exponents"], from_report["exponents"]);
    assert_eq!(from_report["report"], parse(&report_text));
}

#[test]
fn every_command_is_deterministic() {
    let docs = [
        json!({"command": "rates", "seed": 3, "channel": depolarizing(0.2), "state": "random"}),
        json!({"command": "optimize", "seed": 3, "channel": depolarizing(0.2),
               "optimizer": {"objective": "ea_df", "restarts": 3, "max_evals": 400}}),
        json!({"command": "feasible", "seed": 3, "channel": depolarizing(0.2), "state": "random",
               "rate_point": {"Q": 0.05, "L_B": 0.1, "L_B_hat": 0.05}}),
        json!({"command": "sweep", "channel": depolarizing(0.0), "state": "random",
               "sweep": {"param": "channel.link.params.p", "start": 0.0, "stop": 0.5, "steps": 3}}),
        json!({"command": "fqsw", "seed": 3, "fqsw": {"state": "random", "trials": 100}}),
    ];
    for doc in docs {
        let a = execute(&config(doc.clone())).unwrap();
        let b = execute(&config(doc.clone())).unwrap();
        assert_eq!(a, b, "{doc}");
    }
}

#[test]
fn binary_writes_outputs_and_trial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let status = Process::new(BIN)
        .args(["--command", "fqsw", "--state", "decoupled", "--trials", "20", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc = parse(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(doc["trials"].as_array().unwrap().len(), 20);
    let csv = std::fs::read_to_string(dir.path().join("result.trials.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn binary_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "cfg.json",
        &json!({"command": "rates", "channel": noiseless(), "state": "maxent_a1a"}),
    );
    let out = Process::new(BIN)
        .arg("--config")
        .arg(&path)
        .args(["--channel", "erasure", "--p", "0.25"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc = parse(&String::from_utf8(out.stdout).unwrap());
    assert!((doc["coh_a1_B"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn config_errors_exit_with_code_two() {
    let unknown = Process::new(BIN)
        .args(["--command", "rates", "--channel", "teleporter"])
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(EXIT_CONFIG));

    let dir = tempfile::tempdir().unwrap();
    let malformed = json!({
        "command": "rates",
        "state": "random",
        "channel": {"relay": "kraus", "kraus": [[[[1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]],
                    "input_dims": [2, 1], "output_dims": [2, 1]}
    });
    let mismatch = json!({
        "command": "rates",
        "channel": noiseless(),
        "state": {"amplitudes": [[1.0, 0.0], [0.0, 0.0]], "dims": [1, 2, 1]}
    });
    for (name, doc) in [("malformed.json", malformed), ("mismatch.json", mismatch)] {
        let path = write_config(dir.path(), name, &doc);
        let out = Process::new(BIN).arg("--config").arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(EXIT_CONFIG), "{name}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{name}: {err}");
    }
}

#[test]
fn numeric_errors_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let zero = json!({
        "command": "rates",
        "channel": noiseless(),
        "state": {"amplitudes": vec![[0.0, 0.0]; 8], "dims": [2, 2, 2]}
    });
    let path = write_config(dir.path(), "zero.json", &zero);
    let out = Process::new(BIN).arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_NUMERIC));
}

#[test]
fn check_flag_lists_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "bad.json",
        &json!({"command": "rates", "channel": defective_kraus(1e-3), "state": "random"}),
    );
    let out = Process::new(BIN).arg("--config").arg(&path).arg("--check").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8(out.stderr).unwrap().contains("completeness"));
}
