//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line and details (visible with `cargo test -- --nocapture`). Tolerances
//! are pinned inside `dbqite::verify`.

use dbqite::verify::{self, CriterionResult, VerifyConfig};

fn check(result: CriterionResult) {
    println!("{}", result.summary_line());
    for line in &result.details {
        println!("    {line}");
    }
    assert!(
        result.passed,
        "criterion {} failed:\n{}",
        result.id,
        result.details.join("\n")
    );
}

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

#[test]
fn criterion_01_ite_fluctuation_refrigeration() {
    check(verify::criterion_01_ite_frr(&cfg()));
}

#[test]
fn criterion_02_ite_double_bracket_residual() {
    check(verify::criterion_02_ite_dbf(&cfg()));
}

#[test]
fn criterion_03_compact_step_equivalence() {
    check(verify::criterion_03_compact_form(&cfg()));
}

#[test]
fn criterion_04_dbi_step_oracle() {
    check(verify::criterion_04_dbi_oracle(&cfg()));
}

#[test]
fn criterion_05_group_commutator_bound() {
    check(verify::criterion_05_gci_bound(&cfg()));
}

#[test]
fn criterion_06_fidelity_increase_guarantee() {
    check(verify::criterion_06_theorem2(&cfg()));
}

#[test]
fn criterion_07_cooling_guarantee() {
    check(verify::criterion_07_theorem1(&cfg()));
}

#[test]
fn criterion_08_dbi_guarantees() {
    check(verify::criterion_08_dbi_theorems(&cfg()));
}

#[test]
fn criterion_09_heisenberg_benchmarks() {
    check(verify::criterion_09_heisenberg(&cfg()));
}

#[test]
fn criterion_10_excess_energy_halving() {
    check(verify::criterion_10_excess_energy(&cfg()));
}

#[test]
fn criterion_11_gate_counts() {
    check(verify::criterion_11_gate_counts(&cfg()));
}

#[test]
fn criterion_12_qpe_baseline() {
    check(verify::criterion_12_qpe(&cfg()));
}

#[test]
fn criterion_13_warm_start_dominance() {
    check(verify::criterion_13_warm_start(&cfg()));
}
