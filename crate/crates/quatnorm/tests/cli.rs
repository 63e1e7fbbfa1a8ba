//! Behavior of the installed binary: exit codes, output formats, and
//! byte-level determinism of JSON across runs and thread counts.

use std::process::{Command, Output};

fn quatnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn check_human_output() {
    let out = quatnorm(&["check", "3", "--algebra", "p:67"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("outlier"));
    assert!(stderr(&out).contains("elapsed"));

    let out = quatnorm(&["check", "12", "--algebra", "p:67"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("norm of an integer"));
}

#[test]
fn json_is_byte_identical_and_reparses() {
    let a = quatnorm(&["check", "12", "--algebra", "p:67", "--json"]);
    let b = quatnorm(&["check", "12", "--algebra", "p:67", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));

    let report: quatnorm::cli::RunReport = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report.schema_version, 1);
    assert_eq!(quatnorm::cli::to_json(&report), stdout(&a));
}

#[test]
fn json_independent_of_thread_count() {
    let one = quatnorm(&[
        "scan", "--max-prime", "200", "--mode", "fixed-m:2", "--json", "--threads", "1",
    ]);
    let four = quatnorm(&[
        "scan", "--max-prime", "200", "--mode", "fixed-m:2", "--json", "--threads", "4",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["check", "3"][..],
        &["density", "--m", "2", "--expr", "sym(3)=1"],
        &["density"],
        &["density", "--expr", "sym(0)=1"],
        &["scan", "--max-prime", "2000", "--mode", "no-outliers"],
        &["scan", "--max-prime", "100", "--mode", "bogus"],
        &["scan", "--max-prime", "5", "--mode", "fixed-m:2"],
        &["enumerate", "--algebra", "q:9"],
        &["density", "--m", "2", "--empirical", "50"],
        &["check", "3", "--algebra", "p:67", "--json", "--csv"],
        &["check", "3", "--algebra", "p:67", "--csv"],
    ] {
        let out = quatnorm(args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {}", stderr(&out));
    }
    // parse errors carry a byte position
    let out = quatnorm(&["density", "--expr", "sym(0)=1"]);
    assert!(stderr(&out).contains("byte 4"), "{}", stderr(&out));
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        &["check", "5", "--algebra", "sym:1,5"][..],
        &["check", "0", "--algebra", "p:67"],
        &["check", "-3", "--algebra", "p:67"],
        &["report", "3", "4"],
        &["check", "3", "--algebra", "p:4"],
    ] {
        let out = quatnorm(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", stderr(&out));
    }
    let out = quatnorm(&["check", "5", "--algebra", "sym:1,5"]);
    assert!(stderr(&out).contains("matrix algebra"));
}

#[test]
fn indefinite_enumerate_is_a_gate_not_an_error() {
    let out = quatnorm(&["enumerate", "--algebra", "ram:2,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("indefinite"));
}

#[test]
fn csv_formats() {
    let out = quatnorm(&["scan", "--max-prime", "30", "--mode", "fixed-m:2", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,verdict_or_set,M,elapsed_ms"));
    assert_eq!(lines.clone().count(), 10); // primes up to 30

    let out = quatnorm(&["enumerate", "--algebra", "p:67", "--csv"]);
    assert_eq!(stdout(&out), "m0,M,C\n3,280,67\n");

    let out = quatnorm(&["scan", "--max-prime", "100", "--mode", "base-sets", "--csv"]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("67,{3},280,")), "{text}");
}

#[test]
fn verify_band_flag() {
    let out = quatnorm(&[
        "enumerate", "--algebra", "p:11", "--verify-band", "4", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: quatnorm::cli::RunReport = serde_json::from_str(&stdout(&out)).unwrap();
    match report.results {
        quatnorm::cli::Payload::Enumerate(e) => {
            assert_eq!(e.m_bound, 7);
            assert_eq!(e.verified_band, Some(28));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn density_with_empirical_scan() {
    let out = quatnorm(&["density", "--m", "6", "--empirical", "1000", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: quatnorm::cli::RunReport = serde_json::from_str(&stdout(&out)).unwrap();
    match report.results {
        quatnorm::cli::Payload::Density(d) => {
            assert_eq!(d.density.numerator, 1);
            assert_eq!(d.density.denominator, 16);
            let emp = d.empirical.expect("empirical table present");
            assert!(emp.sample > 100);
            assert_eq!(emp.prime_bound, 1000);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn supersingular_report_text() {
    let out = quatnorm(&["report", "3", "67"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out)
        .contains("no supersingular elliptic curve over the algebraic closure of GF(67)"));

    let out = quatnorm(&["report", "4", "67"]);
    assert!(stdout(&out).contains("multiplication by 2"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(quatnorm(&["--help"]).status.code(), Some(0));
    assert_eq!(quatnorm(&["--version"]).status.code(), Some(0));
    assert_eq!(quatnorm(&[]).status.code(), Some(1));
}
