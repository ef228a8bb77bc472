use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> (i32, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polymoment"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value)
}

const T6: &str = r#"{"P": [-1, 0, 18, 0, -48, 0, 32], "a": -0.8660254037844386, "b": 0.8660254037844386"#;

#[test]
fn analyze_chebyshev() {
    let (code, v) = run(&["--command", "analyze"], &format!("{T6}}}"));
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["result"]["D"], serde_json::json!([1, 2, 3, 6]));
    assert_eq!(v["options"]["moments"], 25);
    assert!(v["version"].is_string());
}

#[test]
fn verify_and_decompose() {
    // Q = T2 + T3 = 2z^2 - 1 + 4z^3 - 3z
    let job = format!(r#"{T6}, "Q": [-1, -3, 2, 4]}}"#);
    let (code, v) = run(&["--command", "verify"], &job);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["verdict"], true);
    let (code, v) = run(&["--command", "decompose", "--tol-phi", "1e-8"], &job);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"].as_array().unwrap().len(), 2);
    assert_eq!(v["options"]["tol"]["phi"], 1e-8);
}

#[test]
fn negative_outcomes_exit_2() {
    let job = r#"{"command": "verify", "P": [0, 0, 1], "a": -1, "b": 1, "Q": [0, 1]}"#;
    let (code, v) = run(&[], job);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["verdict"], false);
    assert_eq!(v["result"]["nonvanishing_moments"][0], 0);
    let m0 = &v["result"]["moments"][0];
    assert!((m0[0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let (code, v) = run(&["--command", "decompose"], job);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "NotASolution");
}

#[test]
fn malformed_input_exits_64() {
    assert_eq!(run(&["--command", "analyze"], "{not json").0, 64);
    assert_eq!(run(&["--command", "analyze"], r#"{"P": [0, 1]}"#).0, 64);
    assert_eq!(run(&["--command", "analyze"], r#"{"P": [0, 0, 1], "a": 1, "b": 1}"#).0, 64);
    assert_eq!(run(&[], r#"{"command": "frobnicate"}"#).0, 64);
    assert_eq!(run(&["--command", "bogus"], "").0, 64);
    let (code, v) = run(&["--command", "analyze", "--tol-root", "-1"], &format!("{T6}}}"));
    assert_eq!(code, 64, "{v}");
}

#[test]
fn generate_round_trips_through_decompose() {
    let (code, job) = run(&["--command", "generate", "--seed", "5"], "");
    assert_eq!(code, 0);
    let text = serde_json::to_string(&job["result"]).unwrap();
    let (code, v) = run(&[], &text);
    assert_eq!(code, 0, "{v}");
    assert!(!v["result"].as_array().unwrap().is_empty());
    assert_eq!(v["options"]["seed"], 5);
}

#[test]
fn output_keys_are_sorted() {
    let (_, v) = run(&["--command", "analyze"], &format!("{T6}}}"));
    let text = serde_json::to_string(&v).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(text.find("\"command\"").unwrap() < text.find("\"version\"").unwrap());
}

#[test]
fn selftest_reports_every_criterion() {
    let (code, v) = run(&["--command", "selftest"], "");
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["criteria"].as_array().unwrap().len(), 10);
}

#[test]
fn file_flags() {
    let dir = std::env::temp_dir().join(format!("polymoment-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (input, output) = (dir.join("job.json"), dir.join("report.json"));
    std::fs::write(&input, format!("{T6}}}")).unwrap();
    let (code, _) = run(&["--command", "analyze", "-i", input.to_str().unwrap(), "-o", output.to_str().unwrap()], "");
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["result"]["existence"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let job = format!(r#"{T6}, "Q": [-1, -3, 2, 4]}}"#);
    let first = run(&["--command", "decompose"], &job).1;
    let second = run(&["--command", "decompose"], &job).1;
    assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&second).unwrap());
}
