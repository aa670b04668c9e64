use std::process::{Command, Output};

fn harmoniq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmoniq"))
        .args(args)
        .env_remove("HARMONIQ_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn number(json: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v[key].as_f64().unwrap_or_else(|| panic!("no number under {key}"))
}

#[test]
fn rus_output_is_reproducible() {
    let args = ["rus", "--n", "64", "--trials", "100000", "--seed", "1"];
    let a = harmoniq(&args);
    let b = harmoniq(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_harmoniq"))
        .args(args)
        .env("HARMONIQ_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let mean = number(&stdout(&a), "mean");
    assert!((mean / number(&stdout(&a), "fit") - 1.0).abs() < 0.15);
}

#[test]
fn optimize_state_22() {
    let o = harmoniq(&["optimize", "--target", "state", "--n", "22", "--epsilon", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    let depth = number(&stdout(&o), "t_depth");
    assert!((depth / 1700.0 - 1.0).abs() < 0.10, "t_depth {depth}");
}

#[test]
fn floats_use_17_significant_digits() {
    let o = harmoniq(&["optimize", "--target", "state", "--n", "22", "--epsilon", "1e-9"]);
    assert!(stdout(&o).contains("\"epsilon\": 1.0000000000000001e-9"));
}

#[test]
fn csv_table_columns() {
    let o = harmoniq(&["optimize", "--target", "block", "--n", "8", "--epsilon", "1e-6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), harmoniq::report::TABLE_COLUMNS.join(","));
    assert!(lines.next().unwrap().starts_with("8,"));
}

#[test]
fn grid_order_does_not_depend_on_threads() {
    let args = ["table", "--grid", "--nmin", "4", "--nmax", "8", "--decades", "6", "--format", "csv"];
    let a = harmoniq(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_harmoniq")).args(args).env("HARMONIQ_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 5 * 5);
}

#[test]
fn verify_lemmas_prints_one_line_per_lemma() {
    let o = harmoniq(&["verify", "--suite", "lemmas", "--nmax", "10"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")));
    let any_failed = lines.iter().any(|l| l.starts_with("FAIL "));
    assert_eq!(o.status.code(), Some(if any_failed { 3 } else { 0 }));
    for name in ["widget", "cotangent", "first-asymptote", "combined-asymptotes", "convolution", "diagonal-harmonic"] {
        assert!(lines.iter().any(|l| l.contains(&format!(" {name}: "))), "missing {name}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(harmoniq(&["rus", "--n", "4", "--bogus"]).status.code(), Some(2));
    assert_eq!(harmoniq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(harmoniq(&["linear", "--n", "0"]).status.code(), Some(2));
    assert_eq!(harmoniq(&["qft", "--n", "4", "--delta", "2"]).status.code(), Some(2));
    assert_eq!(harmoniq(&["optimize", "--target", "state", "--n", "20", "--epsilon", "1e-14"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_harmoniq"))
        .args(["rus", "--n", "4"])
        .env("HARMONIQ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_commands_report_exact_results() {
    let o = harmoniq(&["state", "--n", "4", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(number(&s, "distance_to_cotangent") < 1e-10);
    assert!((number(&s, "success_prob") - number(&s, "success_prob_oracle")).abs() < 1e-10);

    let o = harmoniq(&["linear", "--n", "4"]);
    assert!(number(&stdout(&o), "distance") < 1e-12);

    let o = harmoniq(&["block", "--n", "4"]);
    assert!(number(&stdout(&o), "residual") < 1e-10);

    let o = harmoniq(&["diag", "--n", "3", "--m", "1", "--costing", "naive"]);
    let s = stdout(&o);
    assert!(s.contains("\"costing\": \"naive\""));
    let ratio = number(&s, "distance") / number(&s, "predicted_distance");
    assert!((0.5..=2.0).contains(&ratio));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("harmoniq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.json");
    let o = harmoniq(&["table", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rows.as_array().unwrap().len() >= 5);
    std::fs::remove_dir_all(dir).unwrap();
}
