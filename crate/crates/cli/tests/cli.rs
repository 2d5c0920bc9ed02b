use std::process::Command;

use avmod_cli::{builtin_scenarios, parse_scenarios, run_all, run_scenario, to_json, RunOptions, Status};

fn avmod(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_avmod")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn verify_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("all.json");
    let (code, out, _) = avmod(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS elliptic-gauge"));
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = reports.as_array().unwrap().iter().map(|r| r["scenario"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), builtin_scenarios().len());
}

#[test]
fn filter_selects_gk_only() {
    let reports = run_all(Some("gk"), &RunOptions::default()).unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r.scenario.contains("gk") || r.checks.iter().any(|c| c.check.contains("gk"))));
    assert!(reports.iter().all(|r| r.checks.iter().all(|c| c.check == "gk")));
}

#[test]
fn builtin_examples() {
    let opts = RunOptions::default();
    for name in ["elliptic-gauge", "p1-det-lambda"] {
        let s = builtin_scenarios().into_iter().find(|s| s.name == name).unwrap();
        let r = run_scenario(&s, &opts).unwrap();
        assert!(r.passed, "{}", r.summary_line());
    }
    let p1 = builtin_scenarios().into_iter().find(|s| s.name == "p1-det-lambda").unwrap();
    assert_eq!(p1.params.lambda.as_deref(), Some("2"));
}

#[test]
fn mutated_gauge_fixture_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name": "bad-gauge", "module": "fixture:corrupt-gauge", "checks": ["smash"], "params": {"degree": 2}}"#,
    )
    .unwrap();
    let (code, out, _) = avmod(&["scenario", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL bad-gauge"));
    assert!(out.contains("relation"), "{out}");
}

#[test]
fn malformed_expression_reports_position() {
    let (code, _, err) = avmod(&["diff-order", "--module", "tensor(poly(x), bogus(1))"]);
    assert_eq!(code, 2);
    assert!(err.contains("position 16"), "{err}");
    let bad = r#"{"name": "x", "module": "charged(poly(x), 1/3", "checks": ["smash"]}"#;
    match parse_scenarios(bad) {
        Err(avmod::error::Error::Parse { pos, .. }) => assert_eq!(pos, 20),
        other => panic!("{other:?}"),
    }
    assert!(parse_scenarios(r#"{"name": "x", "checks": ["nope"]}"#).is_err());
    assert!(parse_scenarios("{ not json").is_err());
}

#[test]
fn reports_are_deterministic_and_record_seed() {
    let opts = RunOptions { seed: 5, samples: 8, timings: false };
    let a = to_json(&run_all(Some("local-iso"), &opts).unwrap());
    let b = to_json(&run_all(Some("local-iso"), &opts).unwrap());
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 5"));
    assert!(a.contains("\"products\": 8"));
    let dir = tempfile::tempdir().unwrap();
    let (p, q) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&p, &q] {
        let (code, _, _) = avmod(&["verify", "--filter", "casimir", "--seed", "3", "--json", path.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
}

#[test]
fn timings_only_when_requested() {
    let plain = run_all(Some("casimir-table"), &RunOptions::default()).unwrap();
    assert!(plain[0].checks[0].millis.is_none());
    let timed = run_all(Some("casimir-table"), &RunOptions { timings: true, ..RunOptions::default() }).unwrap();
    assert!(timed[0].checks[0].millis.is_some());
}

#[test]
fn expected_error_scenarios() {
    let s = parse_scenarios(r#"{"name": "h", "atlas": "p1", "checks": ["glue"], "params": {"rule": "det:1/2", "expect_error": "NotIntegrable"}}"#)
        .unwrap();
    assert!(run_scenario(&s[0], &RunOptions::default()).unwrap().passed);
    let s = parse_scenarios(r#"{"name": "h", "atlas": "p1", "checks": ["glue"], "params": {"rule": "det:1/2"}}"#).unwrap();
    let r = run_scenario(&s[0], &RunOptions::default()).unwrap();
    assert_eq!(r.checks[0].status, Status::Fail);
}

#[test]
fn subcommands() {
    let (code, out, _) = avmod(&["diff-order", "--module", "tensor(poly(x), alpha(1))", "--nmax", "4", "--degree", "5"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with('3'), "{out}");
    let (code, out, _) = avmod(&["diff-order", "--module", "tensor(poly(x), alpha(1))", "--nmax", "2", "--degree", "5"]);
    assert_eq!(code, 1, "{out}");

    let (code, out, err) = avmod(&["gk", "--module", "poly(x,y)", "--lmax", "10"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("l,dim,log_l,log_dim\n0,1,"));
    assert!(out.contains("\n10,66,"));
    assert!(err.contains("exponent"));

    let (code, out, _) = avmod(&["rep", "--expr", "ext(2,3)", "--casimirs", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dim"], 3);
    assert_eq!(v["exterior_type"], 2);
    assert_eq!(v["casimirs"][1], "4");

    let (code, out, _) = avmod(&["glue", "--atlas", "gm", "--rule", "charged:1/3"]);
    assert_eq!(code, 1);
    assert!(out.contains("[]"), "{out}");
    let (code, _, _) = avmod(&["glue", "--atlas", "p1", "--rule", "det:2"]);
    assert_eq!(code, 0);
}
