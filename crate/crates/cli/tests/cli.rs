//! End-to-end checks of the command dispatch: values, determinism, exit
//! codes, and report round-tripping.

use std::process::Command as Process;

use serde_json::{json, Value};

use hermass_cli::{run, Command, RunConfig};

fn p1_singular_config() -> Value {
    json!({
        "curve": {"q": {"p": 2, "e": 1}, "model": "projective_line"},
        "infinity": {"id": "inf", "degree": 1},
        "o": {"id": "o", "degree": 1},
        "algebra": {"d": 2, "invariants": [
            {"place": "o", "degree": 1, "num": "1", "den": "2"},
            {"place": "x1", "degree": 1, "num": "1", "den": "2"}
        ]},
        "f": [1, 1],
        "level": [{"place": {"id": "n1", "degree": 2}, "multiplicity": 1}]
    })
}

#[test]
fn zeta_p1_report_values() {
    let config = RunConfig {
        command: Command::Zeta,
        payload: json!({"q": {"p": 2, "e": 1}, "model": "projective_line"}),
        seed: None,
    };
    let report = run(&config).unwrap();
    let result = &report["result"];
    assert_eq!(result["numerator"], json!(["1"]));
    assert_eq!(result["class_number"], json!("1"));
    assert_eq!(result["specials"]["1"], json!({"num": "1", "den": "3"}));
    assert_eq!(report["command"], json!("zeta"));
    assert_eq!(report["version"], json!(env!("CARGO_PKG_VERSION")));
}

#[test]
fn order_command_matches_block_order() {
    let config = RunConfig {
        command: Command::Order,
        payload: json!({"d": 2, "f": [1, 1], "q": {"p": 2, "e": 1}, "N": 3}),
        seed: None,
    };
    let report = run(&config).unwrap();
    let result = &report["result"];
    assert_eq!(result["dimension"], json!(11));
    assert_eq!(result["closed_and_unital"], json!(true));
    assert_eq!(result["matches_block_order"], json!(true));
}

#[test]
fn centralizer_command_d3() {
    let config = RunConfig {
        command: Command::Centralizer,
        payload: json!({"d": 3, "f": [2, 0, 1], "q": {"p": 2, "e": 1}, "N": 2}),
        seed: Some(7),
    };
    let report = run(&config).unwrap();
    let result = &report["result"];
    assert_eq!(result["dimension"], json!(16));
    assert_eq!(result["certificate"]["valid"], json!(true));
    assert_eq!(report["seed"], json!(7));
}

#[test]
fn singular_command_value() {
    let config = RunConfig {
        command: Command::Singular,
        payload: p1_singular_config(),
        seed: None,
    };
    let report = run(&config).unwrap();
    let result = &report["result"];
    assert_eq!(result["d_of_n"], json!("180"));
    assert_eq!(result["singular_count"], json!({"num": "180", "den": "1"}));
}

#[test]
fn singular_requires_corollary_shape() {
    let mut payload = p1_singular_config();
    payload["level"] = json!([]);
    let config = RunConfig {
        command: Command::Singular,
        payload,
        seed: None,
    };
    let err = run(&config).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn degenerate_payloads_are_validation_errors() {
    for (command, payload) in [
        (
            Command::Order,
            json!({"d": 0, "f": [], "q": {"p": 2, "e": 1}, "N": 2}),
        ),
        (
            Command::Order,
            json!({"d": 2, "f": [1, 1], "q": {"p": 2, "e": 1}, "N": 0}),
        ),
        (
            Command::Centralizer,
            json!({"d": 0, "f": [], "q": {"p": 2, "e": 1}, "N": 2}),
        ),
        (Command::Mass, {
            let mut cfg = p1_singular_config();
            cfg["infinity"] = json!({"id": "inf", "degree": 0});
            cfg
        }),
        (Command::Mass, {
            let mut cfg = p1_singular_config();
            cfg["level"] = json!([{"place": {"id": "n1", "degree": 0}, "multiplicity": 1}]);
            cfg
        }),
        (Command::Mass, {
            let mut cfg = p1_singular_config();
            cfg["algebra"]["d"] = json!(0);
            cfg["f"] = json!([]);
            cfg
        }),
    ] {
        let err = run(&RunConfig {
            command,
            payload,
            seed: None,
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2, "{}", err);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (command, payload) in [
        (
            Command::Zeta,
            json!({"q": {"p": 2, "e": 1}, "model": "projective_line"}),
        ),
        (Command::Singular, p1_singular_config()),
    ] {
        let a = run(&RunConfig {
            command,
            payload: payload.clone(),
            seed: Some(42),
        })
        .unwrap();
        let b = run(&RunConfig {
            command,
            payload,
            seed: Some(42),
        })
        .unwrap();
        let sa = serde_json::to_string_pretty(&a).unwrap();
        let sb = serde_json::to_string_pretty(&b).unwrap();
        assert_eq!(sa, sb);
    }
}

#[test]
fn report_reparses_and_rationals_roundtrip() {
    let config = RunConfig {
        command: Command::Mass,
        payload: p1_singular_config(),
        seed: None,
    };
    let report = run(&config).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    let mass: hermass::mass::MassReport = serde_json::from_value(back["result"].clone()).unwrap();
    assert_eq!(mass.mass, hermass::rational::Rational::one());
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_hermass");

    // Valid config: exit 0 with a report on stdout.
    let out = Process::new(exe)
        .args(["zeta", "--config", "-"])
        .arg_stdin(r#"{"q":{"p":2,"e":1},"model":"projective_line"}"#)
        .expect("spawn");
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["class_number"], json!("1"));

    // Invalid config: exit 2 with a machine-readable error list.
    let out = Process::new(exe)
        .args(["zeta", "--config", "-"])
        .arg_stdin(r#"{"q":{"p":4,"e":1},"model":"projective_line"}"#)
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    let errors: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(errors["errors"].as_array().is_some_and(|a| !a.is_empty()));
}

/// Helper to run a process with a fixed stdin payload.
trait StdinExt {
    fn arg_stdin(&mut self, input: &str) -> std::io::Result<std::process::Output>;
}

impl StdinExt for Process {
    fn arg_stdin(&mut self, input: &str) -> std::io::Result<std::process::Output> {
        use std::io::Write;
        use std::process::Stdio;
        let mut child = self
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        child
            .stdin
            .as_mut()
            .expect("stdin piped")
            .write_all(input.as_bytes())?;
        child.wait_with_output()
    }
}
