//! End-to-end tests of the command-line interface: determinism, round
//! trips, exit codes, and the report formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_BIN_EXE_qfem"));
    assert!(p.exists(), "binary missing at {}", p.display());
    p = p.canonicalize().unwrap();
    p
}

const CONFIG: &str = "\
N 8
Y 1.0
rho 1.0
domain 0 1
dirichlet 1 1
fmt 10 8
K 2
L 2
layout serial
";

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("problem.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

#[test]
fn synth_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CONFIG);
    let out1 = dir.path().join("a.qc");
    let out2 = dir.path().join("b.qc");
    for out in [&out1, &out2] {
        let st = run(&[
            "synth",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "synthesis must be byte-identical");

    // parse back and simulate through the simulate subcommand
    let text = String::from_utf8(a).unwrap();
    let circuit = qfem_core::circuit::parse_circuit(&text).unwrap();
    let n = circuit.num_qubits() as usize;
    let input = "0".repeat(n);
    let sim = run(&["simulate", out1.to_str().unwrap(), "--input", &input]);
    assert!(sim.status.success());
    let stdout = String::from_utf8(sim.stdout).unwrap();
    let first = stdout.lines().next().unwrap();
    let direct = circuit
        .simulate(&input.parse().unwrap())
        .unwrap()
        .to_string();
    assert_eq!(first, direct);
    assert!(stdout.contains("theta ="));
}

#[test]
fn simulate_adder_register_dump() {
    let dir = tempfile::tempdir().unwrap();
    let fmt = qfem_core::FixedPointFormat::unsigned(5, 0).unwrap();
    let adder = qfem_core::adders::build_add(fmt);
    let path = dir.path().join("add.qc");
    std::fs::write(&path, qfem_core::circuit::write_circuit(&adder)).unwrap();
    // a=3, b=5 packed: a is qubits 0..4, carry 5, b 6..10
    let mut input = qfem_core::BitString::zeros(11);
    input.set_register_code(adder.register("a").unwrap(), 3);
    input.set_register_code(adder.register("b").unwrap(), 5);
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--input",
        &input.to_string(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("b = 8"), "{stdout}");
    // bad length errors out
    let bad = run(&["simulate", path.to_str().unwrap(), "--input", "010"]);
    assert!(!bad.status.success());
}

#[test]
fn check_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CONFIG);
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("max deviation"));
    assert!(stdout.contains("all_match=true"));
}

#[test]
fn resources_reports_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CONFIG);
    let out = run(&["resources", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("oracle total"));
    assert!(stdout.contains("oracle.qubits="));
    assert!(!stdout.contains(" NO "), "a formula failed:\n{stdout}");
}

#[test]
fn spectrum_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CONFIG);
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("ok                  = true"));
}

#[test]
fn malformed_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, &CONFIG.replace("fmt 10 8", "fmt ten 8"));
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 6"), "{stderr}");
}

#[test]
fn corrupted_circuit_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qc");
    std::fs::write(&path, "qubits 2\nx q9\n").unwrap();
    let out = run(&["simulate", path.to_str().unwrap(), "--input", "00"]);
    assert!(!out.status.success());
}

#[test]
fn lower_mcx_flag_produces_toffoli_only_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CONFIG);
    let out_path = dir.path().join("lowered.qc");
    let st = run(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--lower-mcx",
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(!text.contains("\nmcx "), "lowered file still has mcx gates");
    assert!(text.contains("mcx_pool"));
}
