//! End-to-end tests of the `gossipbench` binary: exit codes, artifact
//! determinism and the stats/run/sweep surfaces.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gossipbench"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn binary");
    assert!(
        out.status.success(),
        "expected success for {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    bin()
        .args(args)
        .output()
        .expect("spawn binary")
        .status
        .code()
        .expect("exit code")
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(exit_code(&[]), 2, "missing subcommand");
    assert_eq!(exit_code(&["frobnicate"]), 2, "unknown subcommand");
    assert_eq!(exit_code(&["run", "--no-such-flag"]), 2, "unknown flag");
    assert_eq!(
        exit_code(&["run", "--dataset", "pa:50:2", "--set", "bogus_key=1"]),
        2,
        "unknown config key"
    );
    assert_eq!(
        exit_code(&["run", "--dataset", "no/such/file.txt"]),
        2,
        "missing dataset file"
    );
    assert_eq!(
        exit_code(&["run", "--dataset", "pa:50:2", "--policy", "qp", "--memory", "2"]),
        2,
        "memory with quasirandom policy"
    );
    assert_eq!(
        exit_code(&["sweep", "--dataset", "pa:50:2", "--axis", "nope", "--values", "1"]),
        2,
        "unknown sweep axis"
    );
    assert_eq!(exit_code(&["--version"]), 0);
    assert_eq!(exit_code(&["--help"]), 0);
}

#[test]
fn stats_reports_known_graph() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("tiny.txt");
    // Star of degree 4 plus a pendant chain: LCC is the whole graph.
    std::fs::write(&path, "1 2\n1 3\n1 4\n1 5\n5 6\n").expect("write dataset");
    let out = run_ok(&["stats", "--dataset", path.to_str().expect("utf8 path")]);
    let text = String::from_utf8(out.stdout).expect("utf8");
    let field = |key: &str| -> String {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}\t")))
            .unwrap_or_else(|| panic!("missing key {key} in:\n{text}"))
            .to_string()
    };
    assert_eq!(field("lcc_nodes"), "6");
    assert_eq!(field("lcc_edges"), "5");
    assert_eq!(field("min_out_degree"), "1");
    assert_eq!(field("max_out_degree"), "4");
    assert_eq!(field("dataset"), "tiny");
    // Groups partition the graph.
    let g1: usize = field("g1_nodes").parse().expect("g1");
    let g2: usize = field("g2_nodes").parse().expect("g2");
    let g3: usize = field("g3_nodes").parse().expect("g3");
    assert_eq!(g1 + g2 + g3, 6);
}

#[test]
fn run_artifacts_are_reproducible() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let traces_a = dir.path().join("traces_a");
    let traces_b = dir.path().join("traces_b");
    let common = [
        "run",
        "--dataset",
        "pa:120:2",
        "--reps",
        "4",
        "--seed",
        "99",
        "--targets",
        "0.5,1.0",
    ];

    let mut args_a: Vec<&str> = common.to_vec();
    args_a.extend(["--out", out_a.to_str().expect("path"), "--trace-dir", traces_a.to_str().expect("path")]);
    run_ok(&args_a);

    let mut args_b: Vec<&str> = common.to_vec();
    args_b.extend([
        "--workers",
        "3",
        "--out",
        out_b.to_str().expect("path"),
        "--trace-dir",
        traces_b.to_str().expect("path"),
    ]);
    run_ok(&args_b);

    let csv_a = std::fs::read(&out_a).expect("csv a");
    let csv_b = std::fs::read(&out_b).expect("csv b");
    assert_eq!(csv_a, csv_b, "CSV must not depend on worker count");

    let list = |d: &Path| -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(d)
            .expect("trace dir")
            .map(|e| e.expect("entry").file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    let names = list(&traces_a);
    assert_eq!(names.len(), 4, "one trace per run");
    assert_eq!(names, list(&traces_b));
    for name in &names {
        let a = std::fs::read(traces_a.join(name)).expect("trace a");
        let b = std::fs::read(traces_b.join(name)).expect("trace b");
        assert!(!a.is_empty());
        assert_eq!(a, b, "trace {name} differs");
    }

    // Stdout emission matches the --out file for the same config.
    let out = run_ok(&common);
    assert_eq!(out.stdout, csv_a);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("exp.conf");
    std::fs::write(
        &cfg_path,
        "# comment\ndataset = pa:80:2\npolicy = qp\nreps = 3\nseed = 5\ntargets = 1.0\n",
    )
    .expect("write config");
    // The flag overrides the file's policy; the file's reps remain.
    let out = run_ok(&[
        "run",
        "--config",
        cfg_path.to_str().expect("path"),
        "--policy",
        "qup",
    ]);
    let text = String::from_utf8(out.stdout).expect("utf8");
    let rows: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows.len(), 3, "reps from config file");
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[3], "qup", "flag beats config file");
        assert_eq!(cols[2], "pa:80:2");
    }

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "reps: 3\n").expect("write bad config");
    assert_eq!(
        exit_code(&["run", "--config", bad.to_str().expect("path")]),
        2,
        "malformed config line"
    );
}

#[test]
fn sweep_emits_blocks_with_axis_column() {
    let out = run_ok(&[
        "sweep",
        "--dataset",
        "pa:80:2",
        "--reps",
        "2",
        "--seed",
        "17",
        "--targets",
        "1.0",
        "--axis",
        "policy",
        "--values",
        "random,qp,qpu",
    ]);
    let text = String::from_utf8(out.stdout).expect("utf8");
    let header = text.lines().next().expect("header");
    assert!(header.ends_with(",axis_value"));
    assert_eq!(text.lines().filter(|l| l.starts_with("# block")).count(), 3);
    let data: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 3 * 2);
    for row in &data {
        let last = row.rsplit(',').next().expect("axis value");
        assert!(["random", "qp", "qpu"].contains(&last), "bad axis value in {row}");
        assert!(row.split(',').nth(3) == Some(last), "policy column mirrors axis");
    }
}
