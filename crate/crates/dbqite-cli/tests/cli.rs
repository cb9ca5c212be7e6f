//! End-to-end checks of the command-line surface: artifact round trips,
//! byte-level determinism, config validation, and the guarded error paths.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dbqite"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "command {args:?} unexpectedly succeeded");
    out
}

fn write_config(dir: &Path, stem: &str, body: &str) -> PathBuf {
    let path = dir.join(format!("{stem}.json"));
    std::fs::write(&path, body).unwrap();
    path
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dbqite-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn flow_config(dir: &Path, stem: &str, steps: usize) -> String {
    format!(
        r#"{{
  "schema_version": 1,
  "model": {{"kind": "heisenberg", "length": 4}},
  "init": {{"kind": "singlet"}},
  "engine": "dbqite",
  "steps": {steps},
  "schedule": {{"kind": "grid", "points": 10, "s_max": null, "alpha": 10.0, "beta": 1.0}},
  "evolution": {{"kind": "exact"}},
  "seed": 11,
  "outputs": {{"dir": "{}", "stem": "{stem}"}}
}}"#,
        dir.display()
    )
}

#[test]
fn run_is_byte_deterministic() {
    let dir = temp_dir("determinism");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    let config = write_config(&dir, "config", &flow_config(&dir.join("unused"), "run", 2));
    run_ok(&["run", "--config", config.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    run_ok(&["run", "--config", config.to_str().unwrap(), "--out", out_b.to_str().unwrap()]);
    let csv_a = std::fs::read(out_a.join("run.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("run.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "trace CSV bytes differ between identical runs");

    // the JSON artifacts agree on every numeric field except the wall clock
    let mut json_a: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_a.join("run.json")).unwrap()).unwrap();
    let mut json_b: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_b.join("run.json")).unwrap()).unwrap();
    for v in [&mut json_a, &mut json_b] {
        v.as_object_mut().unwrap().remove("wall_clock_seconds");
        // output directories differ by construction
        v.as_object_mut().unwrap().get_mut("config").unwrap().as_object_mut().unwrap()
            .remove("outputs");
    }
    assert_eq!(json_a, json_b);
}

#[test]
fn run_round_trips_through_the_parser() {
    let dir = temp_dir("roundtrip");
    let config = write_config(&dir, "config", &flow_config(&dir, "trip", 3));
    run_ok(&["run", "--config", config.to_str().unwrap()]);
    let text = std::fs::read_to_string(dir.join("trip.csv")).unwrap();
    let rows = dbqite::trace::parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(dbqite::trace::to_csv(&rows), text);
    // artifact parses back into the typed form
    let artifact: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("trip.json")).unwrap()).unwrap();
    assert_eq!(artifact["config"]["schema_version"], 1);
    assert_eq!(artifact["outcome"]["type"], "flow");
    assert_eq!(artifact["outcome"]["trace"]["records"].as_array().unwrap().len(), 4);
}

#[test]
fn zero_steps_yields_initialization_row_only() {
    let dir = temp_dir("zerosteps");
    let config = write_config(&dir, "config", &flow_config(&dir, "zero", 0));
    run_ok(&["run", "--config", config.to_str().unwrap()]);
    let text = std::fs::read_to_string(dir.join("zero.csv")).unwrap();
    let rows = dbqite::trace::parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].k, 0);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = temp_dir("unknownkey");
    let body = flow_config(&dir, "x", 1).replace("\"seed\": 11,", "\"seed\": 11, \"typo\": 3,");
    let config = write_config(&dir, "config", &body);
    let out = run_err(&["run", "--config", config.to_str().unwrap()]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("schema") || msg.contains("unknown field"), "{msg}");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = temp_dir("schemaver");
    let body = flow_config(&dir, "x", 1).replace("\"schema_version\": 1", "\"schema_version\": 9");
    let config = write_config(&dir, "config", &body);
    let out = run_err(&["run", "--config", config.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema_version"));
}

#[test]
fn degenerate_hamiltonian_fails_fidelity_verification() {
    let dir = temp_dir("degenerate");
    // a single ZZ term: ±1 eigenvalues, each doubly degenerate
    let ham = r#"{"num_qubits": 2, "offset": 0.0,
        "terms": [{"coeff": 1.0, "factors": [[0, "Z"], [1, "Z"]]}]}"#;
    let path = dir.join("degenerate.json");
    std::fs::write(&path, ham).unwrap();
    let out = run_err(&["verify", "--suite", "fidelity", "--hamiltonian", path.to_str().unwrap()]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("unique ground state required"), "{msg}");
}

#[test]
fn custom_gapped_hamiltonian_passes_fidelity_verification() {
    let dir = temp_dir("customok");
    // a gapped two-qubit sum with a unique ground state
    let ham = r#"{"num_qubits": 2, "offset": 0.0,
        "terms": [{"coeff": 1.0, "factors": [[0, "Z"], [1, "Z"]]},
                  {"coeff": 0.4, "factors": [[0, "Z"]]},
                  {"coeff": 0.3, "factors": [[0, "X"]]},
                  {"coeff": 0.2, "factors": [[1, "X"]]}]}"#;
    let path = dir.join("gapped.json");
    std::fs::write(&path, ham).unwrap();
    let out = run_ok(&["verify", "--suite", "fidelity", "--hamiltonian", path.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn verify_suites_pass_and_parallel_matches_sequential() {
    let seq = run_ok(&["verify", "--suite", "lemmas", "--seed", "99"]);
    let par = run_ok(&["verify", "--suite", "lemmas", "--seed", "99", "--threads", "3"]);
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn plot_renders_and_rejects_garbage() {
    let dir = temp_dir("plot");
    let config = write_config(&dir, "config", &flow_config(&dir, "p", 2));
    run_ok(&["run", "--config", config.to_str().unwrap()]);
    let csv = dir.join("p.csv");
    let svg = dir.join("energy.svg");
    run_ok(&["plot", "--kind", "energy", "--out", svg.to_str().unwrap(), csv.to_str().unwrap()]);
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert_eq!(body.matches("<polyline").count(), 1);

    // malformed CSV errors name the offending row/column
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "engine,k,s_k,t_H,t_omega,E_k,V_k,F_k,cz,u3,t,depth\na,0,x,0,0,0,0,0,0,0,0,0\n").unwrap();
    let out = run_err(&["plot", "--kind", "energy", "--out", svg.to_str().unwrap(), bad.to_str().unwrap()]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("row 2") && msg.contains("s_k"), "{msg}");

    // an empty input list is an error
    run_err(&["plot", "--kind", "energy", "--out", svg.to_str().unwrap()]);
}

#[test]
fn cost_table_emits_flow_and_qpe_rows() {
    let out = run_ok(&["cost", "--length", "10", "--steps", "2", "--qpe-precision", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("engine,L,k,cz,u3,t,depth,ancillas"));
    assert_eq!(text.matches("\ndbqite,10,").count(), 3);
    assert_eq!(text.matches("\nqpe,10,").count(), 3);
}

#[test]
fn qpe_subcommand_appends_trace_rows() {
    let dir = temp_dir("qpe");
    let csv = dir.join("qpe.csv");
    run_ok(&["qpe", "--length", "4", "--precision", "2", "--out", csv.to_str().unwrap()]);
    run_ok(&[
        "qpe", "--length", "4", "--precision", "3", "--rescale-factor", "2",
        "--out", csv.to_str().unwrap(),
    ]);
    let rows = dbqite::trace::parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].engine, "qpe");
    assert_eq!(rows[1].k, 3);
    assert_eq!(rows[1].s, 2.0); // rescale factor travels in the s column
}

#[test]
fn ite_engine_writes_monotone_curve() {
    let dir = temp_dir("ite");
    let body = format!(
        r#"{{
  "schema_version": 1,
  "model": {{"kind": "heisenberg", "length": 4}},
  "init": {{"kind": "singlet"}},
  "engine": "ite",
  "steps": 5,
  "schedule": {{"kind": "fixed", "s": 0.3, "alpha": 1.0, "beta": 1.0}},
  "evolution": {{"kind": "exact"}},
  "seed": 1,
  "outputs": {{"dir": "{}", "stem": "ite"}}
}}"#,
        dir.display()
    );
    let config = write_config(&dir, "config", &body);
    run_ok(&["run", "--config", config.to_str().unwrap()]);
    let rows =
        dbqite::trace::parse_csv(&std::fs::read_to_string(dir.join("ite.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    for pair in rows.windows(2) {
        assert!(pair[1].energy <= pair[0].energy + 1e-9);
        assert!(pair[1].fidelity >= pair[0].fidelity - 1e-9);
    }
}
