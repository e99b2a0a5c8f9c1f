//! CLI acceptance: repeated runs with identical configs are byte-identical
//! (criterion 8), and the exit-code contract holds with a machine-parsable
//! reason as the last line of stderr.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn picodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_picodes"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("picodes-accept-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn last_stderr_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr)
        .trim_end()
        .lines()
        .last()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn criterion_8_determinism() {
    let dir = scratch_dir("det");
    let descriptor = dir.join("code.json");
    let descriptor_s = descriptor.to_str().unwrap();

    let configs: Vec<Vec<&str>> = vec![
        vec!["build", "--n", "5,6,7", "--q", "3", "--out", descriptor_s],
        vec!["build", "--primes-from", "5", "--D", "3", "--q", "3"],
        vec![
            "fidelity",
            "--code",
            descriptor_s,
            "--gamma-min",
            "1e-4",
            "--gamma-max",
            "1e-2",
            "--count",
            "8",
            "--discounted",
        ],
        vec!["taylor", "--n", "5,6,7", "--q", "3"],
        vec!["oracle", "--m", "6", "--gamma", "0.1", "--seed", "42"],
        vec!["check", "--n", "5,6,7", "--q", "3"],
    ];

    for args in &configs {
        let first = picodes(args);
        assert!(
            first.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&first.stderr)
        );
        let first_file = descriptor.exists().then(|| fs::read(&descriptor).unwrap());
        let second = picodes(args);
        let second_file = descriptor.exists().then(|| fs::read(&descriptor).unwrap());
        assert_eq!(
            first.stdout, second.stdout,
            "stdout differs between runs of {args:?}"
        );
        assert_eq!(first.stderr, second.stderr);
        assert_eq!(first_file, second_file, "output file differs for {args:?}");
    }

    // The two build paths agree with each other too.
    let by_list = picodes(&["build", "--n", "5,6,7", "--q", "3"]);
    let by_primes = picodes(&["build", "--primes-from", "5", "--D", "3", "--q", "3"]);
    assert_eq!(by_list.stdout, by_primes.stdout);

    fs::remove_dir_all(&dir).ok();
    println!("criterion 8 determinism: PASS");
}

#[test]
fn exit_code_contract() {
    // 0: success.
    let ok = picodes(&["check", "--n", "5,6,7", "--q", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("verdict: PASS"));

    // 2: validation failures, machine-parsable last line.
    let bad = picodes(&["build", "--n", "4,6,7", "--q", "3"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(last_stderr_line(&bad), "NotCoprime: (4,6)");

    let odd = picodes(&["build", "--n", "5,7,9", "--q", "3"]);
    assert_eq!(odd.status.code(), Some(2));
    assert_eq!(
        last_stderr_line(&odd),
        "OddProduct: N=315 is odd (pass the odd-N override to accept)"
    );

    let no_q = picodes(&["build", "--n", "5,6,7"]);
    assert_eq!(no_q.status.code(), Some(2));
    assert!(last_stderr_line(&no_q).starts_with("BadFlags:"));

    let zero_grid = picodes(&[
        "fidelity", "--n", "5,6,7", "--q", "3", "--gamma-min", "0", "--gamma-max", "0",
        "--count", "1",
    ]);
    assert_eq!(zero_grid.status.code(), Some(2));
    assert!(last_stderr_line(&zero_grid).starts_with("GridOutOfRange:"));

    let too_big = picodes(&["oracle", "--m", "15", "--gamma", "0.1", "--seed", "1"]);
    assert_eq!(too_big.status.code(), Some(2));
    assert!(last_stderr_line(&too_big).starts_with("TooLarge:"));

    // 4: I/O failures.
    let missing = picodes(&["fidelity", "--code", "/nonexistent/code.json"]);
    assert_eq!(missing.status.code(), Some(4));
    assert!(last_stderr_line(&missing).starts_with("IoError:"));

    println!("cli exit-code contract: PASS");
}

#[test]
fn grid_endpoints_are_inclusive() {
    let out = picodes(&[
        "fidelity", "--n", "5,6,7", "--q", "3", "--gamma-min", "1e-4", "--gamma-max",
        "1e-2", "--count", "20",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 21, "header plus 20 rows");
    assert!(rows[1].starts_with("1.00000e-4,"));
    assert!(rows[20].starts_with("1.00000e-2,"));
    println!("grid endpoints inclusive: PASS");
}
