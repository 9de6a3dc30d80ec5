use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vqc::qmat::{frobenius_norm, ComplexMatrix};
use vqc::{umat, vcr};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vqc"))
}

fn data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("vqc runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn zero_layers_is_a_config_error() {
    let iris = data("iris01.csv");
    let out = run(&["qcl", "--dataset", iris.to_str().unwrap(), "--layers", "0"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_flag_is_a_config_error() {
    assert_eq!(code(&run(&["kernel", "--dataset", "x.csv", "--no-such-flag"])), 2);
}

#[test]
fn missing_dataset_is_a_data_error() {
    assert_eq!(code(&run(&["kernel", "--dataset", "/nonexistent/data.csv"])), 3);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let iris = data("iris01.csv");
    let out = bin()
        .env("VQC_THREADS", "zero")
        .args(["kernel", "--dataset", iris.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn non_unitary_target_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.umat");
    std::fs::write(&path, "UMAT 1 1\n2 0 0 0\n0 0 1 0\n").unwrap();
    assert_eq!(code(&run(&["vcr", "--target", path.to_str().unwrap()])), 3);
}

#[test]
fn wide_dataset_needs_extended() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.csv");
    let row = |v: f64, y: u8| format!("{}{y}\n", format!("{v},").repeat(256));
    std::fs::write(&path, [row(1.0, 1), row(0.5, 0), row(0.2, 1), row(0.3, 0), row(0.4, 1)].concat()).unwrap();
    let out = run(&["kernel", "--dataset", path.to_str().unwrap(), "--num-seeds", "1"]);
    assert_eq!(code(&out), 2);
    let out = run(&["kernel", "--dataset", path.to_str().unwrap(), "--num-seeds", "1", "--extended"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn kernel_records_then_table() {
    let iris = data("iris01.csv");
    let out = run(&["kernel", "--dataset", iris.to_str().unwrap(), "--lambda", "0.01", "--table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    for line in &lines[..25] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["algo"], "kernel");
        assert!(v.get("wall_time").is_none());
    }
    assert!(lines[25].starts_with("| dataset"));
    assert!(text.contains("| iris01 | kernel | linear | 1.0000/1.0000 |"));
}

#[test]
fn same_seed_gives_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let iris = data("iris01.csv");
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let path = dir.path().join(format!("run{k}.jsonl"));
        let out = bin()
            .env("VQC_THREADS", threads)
            .args([
                "qcl",
                "--dataset",
                iris.to_str().unwrap(),
                "--seed",
                "7",
                "--num-seeds",
                "1",
                "--iters",
                "20",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(String::from_utf8_lossy(&outputs[0]).lines().count(), 5);
}

#[test]
fn ukm_export_feeds_vcr() {
    let dir = tempfile::tempdir().unwrap();
    let iris = data("iris1n1.csv");
    let p = dir.path().join("p.umat");
    let out = run(&[
        "ukm",
        "--dataset",
        iris.to_str().unwrap(),
        "--mode",
        "real",
        "--num-seeds",
        "1",
        "--soc-iters",
        "5",
        "--cg-iters",
        "5",
        "--export-p",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let variants: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .take(3)
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["variant"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(variants, ["X", "P", "OU(X)"]);

    let target = umat::read(&p).unwrap();
    let gates = dir.path().join("p.gates");
    let out = run(&[
        "vcr",
        "--target",
        p.to_str().unwrap(),
        "--layers",
        "4",
        "--restarts",
        "4",
        "--gates-out",
        gates.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cost = rec["cost"].as_f64().unwrap();
    assert!(cost < 1e-6, "cost {cost}");
    let rebuilt = vcr::parse_gate_list(&std::fs::read_to_string(&gates).unwrap(), 2).unwrap();
    let residual = frobenius_norm(&target.adjoint().matmul(&rebuilt).sub(&ComplexMatrix::identity(4)));
    assert!((residual * residual - cost).abs() < 1e-9);
}

#[test]
fn l_delta_search_reports_depth() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("phase.umat");
    umat::write(&p, &vqc::gates::global_phase(0.8, 1)).unwrap();
    let out = run(&["vcr", "--target", p.to_str().unwrap(), "--l-grid", "1,2", "--delta", "1e-8", "--restarts", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["l_delta"], 1);
    assert_eq!(code(&run(&["vcr", "--target", p.to_str().unwrap(), "--l-grid", "2,1"])), 2);
}
