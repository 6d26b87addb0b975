//! Drives the compiled binary the way a user would: validate, run, suite,
//! and the error paths that map to each documented exit code.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gtpsim_core::{format_real, write_path_csv};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gtpsim"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_ok(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bundled_configs_all_validate() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "acceptance.toml" {
            continue;
        }
        let out = bin().arg("validate").arg(&path).output().unwrap();
        run_ok(&out);
    }
}

#[test]
fn run_writes_the_advertised_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(configs_dir().join("spread-count-spike.toml"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    run_ok(&out);

    let dir = tmp.path().join("spread-count-spike");
    for f in [
        "summary.txt",
        "trajectory.csv",
        "detectors.csv",
        "ladder.csv",
    ] {
        assert!(dir.join(f).is_file(), "missing artifact {f}");
    }
    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.contains("status: pass"), "summary:\n{summary}");
    assert!(summary.contains("rounds_played: 4096"));
}

#[test]
fn collateral_violation_exits_three_and_leaves_forensics() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(configs_dir().join("broken-epsilon.toml"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let dir = tmp.path().join("broken-epsilon");
    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(
        summary.contains("status: collateral-violation"),
        "summary:\n{summary}"
    );
    // the round that sank the account is still on disk
    let traj = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 2);
    assert!(traj.lines().nth(1).unwrap().starts_with("1,-5.0"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();

    let out = bin()
        .arg("validate")
        .arg(tmp.path().join("missing.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 1\n[game]\nvariant = \"nope\"\n").unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown keys are rejected rather than silently ignored
    let extra = tmp.path().join("extra.toml");
    let mut text = std::fs::read_to_string(configs_dir().join("broken-epsilon.toml")).unwrap();
    text.push_str("\n[game2]\nx = 1\n");
    std::fs::write(&extra, text).unwrap();
    let out = bin().arg("validate").arg(&extra).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replayed_moves_come_back_bit_for_bit() {
    let tmp = tempfile::tempdir().unwrap();
    let moves = vec![0.5, -1.25, 2.0, 0.0, -0.5, 1.5, -2.0, 0.25];
    write_path_csv(&tmp.path().join("moves.csv"), &moves).unwrap();
    std::fs::write(
        tmp.path().join("replay.toml"),
        "schema_version = 1\n\
         [game]\nvariant = \"single-hedge\"\nhorizon = 8\nseed = 5\n\
         [hedge]\nkind = \"power\"\nexponent = 2.0\nnu = 1.0\n\
         [strategy]\nid = \"bc-single\"\n\
         [reality]\nid = \"replay\"\npath = \"moves.csv\"\n",
    )
    .unwrap();

    let out = bin()
        .arg("run")
        .arg(tmp.path().join("replay.toml"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    run_ok(&out);

    let traj = std::fs::read_to_string(tmp.path().join("replay/trajectory.csv")).unwrap();
    let got: Vec<&str> = traj
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let want: Vec<String> = moves.iter().map(|&x| format_real(x)).collect();
    assert_eq!(got, want);
}

#[test]
fn suite_passes_and_reports_every_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("suite")
        .arg(configs_dir().join("acceptance.toml"))
        .arg("--out")
        .arg(tmp.path())
        .arg("--workers")
        .arg("2")
        .output()
        .unwrap();
    run_ok(&out);

    let report = std::fs::read_to_string(tmp.path().join("suite-report.txt")).unwrap();
    assert!(
        report.starts_with("suite: 7 experiments"),
        "report:\n{report}"
    );
    assert_eq!(report.matches("\nok: ").count(), 7);
    assert!(report.ends_with("result: pass\n"));
    assert!(report.contains("expected collateral-violation, got collateral-violation"));
}
