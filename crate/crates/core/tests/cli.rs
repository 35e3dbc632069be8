//! The `otelbaev` binary: exit codes, formats and determinism.

use std::process::{Command, Output};

fn otelbaev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otelbaev")).args(args).env("OTELBAEV_THREADS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constant_profile_is_flat() {
    let o = otelbaev(&["profile", "--coef", "const:1", "--window", "10", "--n", "21"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("x,d,q_star,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for r in rows {
        assert!((r[1] - 1.0).abs() < 1e-9 && (r[2] - 1.0).abs() < 1e-9 && r[3] < 1e-9);
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["verify-thm33", "--coef", "example2", "--n", "41"];
    let a = otelbaev(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_otelbaev")).args(args).env("OTELBAEV_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_coefficient_lists_catalog() {
    let o = otelbaev(&["profile", "--coef", "airy"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    for label in ["const:<k>", "square", "example1", "example2"] {
        assert!(err.contains(label), "{err}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(otelbaev(&[]).status.code(), Some(2));
    assert_eq!(otelbaev(&["profile", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(otelbaev(&["suite", "--only", "11"]).status.code(), Some(2));
}

#[test]
fn numeric_errors_exit_three() {
    let o = otelbaev(&["profile", "--coef", "const:0", "--n", "3", "--window", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_thm33_passes_for_example2() {
    let o = otelbaev(&["verify-thm33", "--coef", "example2", "--n", "81"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x,d,q_star,I,J,S,J_over_d,I_over_d,S_over_d\n"));
    assert!(text.contains("# result: PASS"));
}

#[test]
fn out_file_receives_json_table() {
    let dir = std::env::temp_dir().join(format!("otelbaev-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cover.json");
    let o = otelbaev(&["cover", "--coef", "square", "--cells", "4", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: PASS"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        assert!((w[0]["plus"].as_f64().unwrap() - w[1]["minus"].as_f64().unwrap()).abs() < 1e-9);
    }
    for r in rows {
        assert!((r["cell_mass"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn every_subcommand_runs() {
    let cases: [&[&str]; 7] = [
        &["kclass", "--coef", "example2", "--n", "9"],
        &["solve", "--coef", "example2", "--f", "triangle", "--n", "11"],
        &["verify-thm35", "--pair", "exp", "--n", "11"],
        &["example1", "--n", "11"],
        &["example2", "--n", "11"],
        &["admissible", "--coef", "const:1", "--p", "1", "--theta", "one"],
        &["suite", "--only", "1,7"],
    ];
    for args in cases {
        let o = otelbaev(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn csv_matches_golden_files() {
    let cases: [(&[&str], &str); 2] = [
        (&["profile", "--coef", "example2", "--window", "5", "--n", "11"], include_str!("golden/profile_example2.csv")),
        (&["cover", "--coef", "square", "--cells", "6"], include_str!("golden/cover_square.csv")),
    ];
    for (args, golden) in cases {
        assert_eq!(stdout(&otelbaev(args)), golden, "{args:?}");
    }
}
