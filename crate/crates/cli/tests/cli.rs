use std::path::Path;
use std::process::{Command, Output};

fn antx(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antx"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("antx runs")
}

const SMALL: [&str; 8] = ["--population", "6", "--scenarios", "2", "--timesteps", "40", "--workers", "2"];

#[test]
fn zero_generations_writes_header_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = antx(&[&["train", "--generations", "0"][..], &SMALL].concat(), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("generation,best_fitness"));
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(dir.path().join("best_genome.json").exists());
}

#[test]
fn same_seed_same_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = antx(&[&["train", "--generations", "2", "--seed", "5"][..], &SMALL].concat(), &dir.path().join(run));
        assert!(out.status.success());
        csvs.push(std::fs::read(dir.path().join(run).join("metrics.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn trained_genome_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    assert!(antx(&[&["train", "--generations", "1"][..], &SMALL].concat(), dir.path()).status.success());
    let genome = dir.path().join("best_genome.json");
    let eval_dir = dir.path().join("eval");
    let out = antx(
        &["eval", "--genome", genome.to_str().unwrap(), "--scenarios", "3", "--timesteps", "30"],
        &eval_dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(eval_dir.join("eval.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn malformed_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = antx(&["eval", "--genome", bad.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let bp = dir.path().join("bp.txt");
    std::fs::write(&bp, "DDD\nD1\n").unwrap();
    let out = antx(&["eval", "--controller", "handcoded", "--blueprint", bp.to_str().unwrap()], dir.path());
    assert!(!out.status.success());

    let out = antx(&[&["train", "--workers", "0"][..], &SMALL[..6]].concat(), dir.path());
    assert!(!out.status.success());
}
