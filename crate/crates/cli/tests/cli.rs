//! End-to-end checks of the command-line surface: determinism, config-file
//! merging, exit codes, and output formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relbelief"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("relbelief-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn infer_reproduces_reference_inferences() {
    let out = run(&[
        "fieller-infer",
        "--xbar", "20.188", "--ybar", "10.699", "--m", "10", "--n", "10",
        "--sigma2", "1", "--delta", "0.1", "--seed", "1", "--mc", "100000",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("estimate: 1.900000"), "{text}");
    assert!(text.contains("plausible region: (1.750000, 2.050000)"), "{text}");
    // Posterior and prior contents near their references.
    let grab = |marker: &str| -> f64 {
        let idx = text.find(marker).unwrap() + marker.len();
        text[idx..].split_whitespace().next().unwrap().parse().unwrap()
    };
    let post = grab("posterior content ");
    assert!((post - 0.982).abs() < 0.01, "posterior content {post}");
    assert!(text.contains("pivotal 0.950000 region: interval (1.769177, 2.017340)"));
}

#[test]
fn same_seed_is_byte_identical_and_worker_invariant() {
    let csv_a = tmp("fig_a.csv");
    let csv_b = tmp("fig_b.csv");
    let base = |out: &Path, workers: &str| -> Output {
        run(&[
            "fieller-infer", "--seed", "7", "--mc", "20000", "--workers", workers,
            "--out", out.to_str().unwrap(),
        ])
    };
    let a = base(&csv_a, "1");
    let b = base(&csv_b, "2");
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a).replace("fig_a", ""), stdout(&b).replace("fig_b", ""));
    assert_eq!(
        std::fs::read(&csv_a).unwrap(),
        std::fs::read(&csv_b).unwrap(),
        "figure data must not depend on the worker count"
    );
    // A different seed changes the simulated masses.
    let csv_c = tmp("fig_c.csv");
    let c = run(&[
        "fieller-infer", "--seed", "8", "--mc", "20000",
        "--out", csv_c.to_str().unwrap(),
    ]);
    assert!(c.status.success());
    assert_ne!(std::fs::read(&csv_a).unwrap(), std::fs::read(&csv_c).unwrap());
}

#[test]
fn seed_env_var_is_honored() {
    let a = bin()
        .args(["fieller-infer", "--mc", "20000"])
        .env("RELBELIEF_SEED", "7")
        .output()
        .unwrap();
    let b = run(&["fieller-infer", "--seed", "7", "--mc", "20000"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let cfg = tmp("config.toml");
    std::fs::write(&cfg, "seed = 7\nmc = 20000\n\n[fieller]\nxbar = 21.0\n").unwrap();
    let from_cfg = run(&["--config", cfg.to_str().unwrap(), "fieller-infer"]);
    assert!(from_cfg.status.success());
    assert!(stdout(&from_cfg).contains("xbar=21.000000"));
    let overridden = run(&[
        "--config", cfg.to_str().unwrap(),
        "fieller-infer", "--xbar", "20.188",
    ]);
    assert!(stdout(&overridden).contains("xbar=20.188000"));
}

#[test]
fn usage_errors_exit_2_numeric_errors_exit_1() {
    let usage = run(&["fieller-infer", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(2));
    // Invalid elicitation inputs: a clean numerical failure.
    let numeric = run(&["elicit", "--family", "fieller", "--r1", "-1"]);
    assert_eq!(numeric.status.code(), Some(1));
    let numeric2 = run(&["elicit", "--family", "fieller", "--psi0", "5"]);
    assert_eq!(numeric2.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&numeric.stderr).contains("error"));
    let bad_config = run(&["--config", "/nonexistent/p.toml", "elicit", "--family", "beta"]);
    assert_eq!(bad_config.status.code(), Some(2));
}

#[test]
fn cox_variant_accepts_both_cases() {
    for v in ["B", "b"] {
        let out = run(&["cox", "--variant", v, "--mc", "20000", "--seed", "3"]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert!(text.contains("whole line (absurd)"), "{text}");
        // Every reported content is a probability.
        for marker in ["posterior content ", "prior content "] {
            let mut rest = text.as_str();
            while let Some(pos) = rest.find(marker) {
                rest = &rest[pos + marker.len()..];
                let v: f64 = rest.split_whitespace().next().unwrap().parse().unwrap();
                assert!((0.0..=1.0).contains(&v), "{marker}{v}");
            }
        }
    }
}

#[test]
fn table_csv_has_stable_header_and_six_decimals() {
    let csv = tmp("t1.csv");
    let out = run(&[
        "normal-mean", "--table", "bias-against", "--prior", "beta",
        "--n-list", "10,20", "--mc", "20000", "--seed", "5",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "n,bias_against[beta]");
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 2);
        let p: f64 = cells[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(cells[1].split('.').nth(1).unwrap().len(), 6);
    }
}

#[test]
fn fieller_bias_quick_outputs() {
    let out = run(&[
        "fieller-bias", "--what", "against", "--mc", "20000", "--seed", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let idx = text.find("bias against:").unwrap();
    let v: f64 = text[idx + 13..].split_whitespace().next().unwrap().parse().unwrap();
    assert!((v - 0.04).abs() < 0.02, "bias against {v}");
}
