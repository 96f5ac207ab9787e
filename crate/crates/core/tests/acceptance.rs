//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p insep-core --test acceptance -- --nocapture` to see
//! the lines; any failure also surfaces through the ordinary test harness.

use insep_core::verify::{run_all, CheckResult, GridSpec};
use insep_core::Limits;
use std::sync::OnceLock;

fn results() -> &'static Vec<CheckResult> {
    static RESULTS: OnceLock<Vec<CheckResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let grid = GridSpec::default();
        let limits = Limits::from_env();
        run_all(&grid, &limits)
    })
}

fn criterion(id: &str) {
    let all = results();
    let check = all
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("criterion {id} missing"));
    println!(
        "ACCEPTANCE {} {}: {} — {}",
        check.id,
        check.name,
        if check.passed { "PASS" } else { "FAIL" },
        check.detail
    );
    assert!(check.passed, "{} {}: {}", check.id, check.name, check.detail);
}

#[test]
fn c0_field_tables() {
    criterion("C0");
}

#[test]
fn c1_formula_sandwich() {
    criterion("C1");
}

#[test]
fn c2_point_counts() {
    criterion("C2");
}

#[test]
fn c3_wreath_counts() {
    criterion("C3");
}

#[test]
fn c4_pickert_roundtrip() {
    criterion("C4");
}

#[test]
fn c5_k_lp_index() {
    criterion("C5");
}

#[test]
fn c6_idempotent_rigidity() {
    criterion("C6");
}

#[test]
fn c7_fieldness_detection() {
    criterion("C7");
}

#[test]
fn c8_filtration_invariant() {
    criterion("C8");
}

#[test]
fn c9_constant_type() {
    criterion("C9");
}
