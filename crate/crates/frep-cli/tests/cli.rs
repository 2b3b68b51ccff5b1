//! End-to-end checks of the `frep` binary: file formats, exit codes,
//! diagnostics, command chaining, and byte-stable re-runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn frep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frep"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("frep-cli-tests").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const SYMMETRIC_F: &str = r#"{"k": 2, "terms": [
  {"word": "a", "re": 1.0, "im": 0.0},
  {"word": "A", "re": 1.0, "im": 0.0},
  {"word": "b", "re": 1.0, "im": 0.0},
  {"word": "B", "re": 1.0, "im": 0.0}
]}"#;

#[test]
fn norm_interval_happy_path() {
    let dir = workdir("interval");
    let f = write(&dir, "f.json", SYMMETRIC_F);
    let out = run(frep()
        .args(["norm", "interval", "--radius", "8", "--seed", "7"])
        .arg("--f")
        .arg(&f));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lower = report["result"]["lower"].as_f64().unwrap();
    let upper = report["result"]["upper"].as_f64().unwrap();
    assert!(lower <= upper);
    assert_eq!(upper, 4.0);
    assert!(lower > 3.2);
    assert_eq!(report["config"]["seed"].as_u64().unwrap(), 7);
}

#[test]
fn missing_seed_exits_two_and_names_the_field() {
    let dir = workdir("missing-seed");
    let f = write(&dir, "f.json", SYMMETRIC_F);
    let out = run(frep()
        .args(["norm", "interval", "--radius", "4"])
        .arg("--f")
        .arg(&f)
        .env_remove("FREP_SEED"));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("seed"), "{}", stderr(&out));
}

#[test]
fn malformed_inputs_exit_two_with_diagnostics() {
    let dir = workdir("malformed");
    let broken = write(&dir, "broken.json", "{\"k\": 2, \"terms\": [");
    let out = run(frep().args(["algebra", "norms"]).arg("--f").arg(&broken));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    let unreduced = write(
        &dir,
        "unreduced.json",
        r#"{"k": 2, "terms": [{"word": "abBA", "re": 1.0, "im": 0.0}]}"#,
    );
    let out = run(frep().args(["algebra", "norms"]).arg("--f").arg(&unreduced));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not reduced"), "{}", stderr(&out));

    let shear = write(
        &dir,
        "shear.json",
        r#"{"k": 2, "d": 2, "gens": [
            [[[1.0,0.0],[1.0,0.0]],[[0.0,0.0],[1.0,0.0]]],
            [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]
        ]}"#,
    );
    let out = run(frep().args(["irr", "test"]).arg("--rep").arg(&shear));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not unitary"), "{}", stderr(&out));
}

#[test]
fn nonpositive_tolerance_exits_two() {
    let dir = workdir("badtol");
    let pauli = write(
        &dir,
        "pauli.json",
        r#"{"k": 2, "d": 2, "gens": [
            [[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]],
            [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]
        ]}"#,
    );
    let out = run(frep()
        .args(["irr", "test", "--tol=-1.0"])
        .arg("--rep")
        .arg(&pauli));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("tol"), "{}", stderr(&out));
}

#[test]
fn commands_chain_through_files() {
    let dir = workdir("chain");
    let eta = dir.join("eta.json");
    let out = run(frep()
        .args(["rep", "haar", "--k", "2", "--d", "2", "--seed", "11"])
        .arg("--out")
        .arg(&eta));
    assert!(out.status.success(), "{}", stderr(&out));

    // The produced file loads as a representation input.
    let csv = dir.join("gen.csv");
    let out = run(frep()
        .args(["lab", "genericity", "--pi-dim", "2", "--trials", "4", "--seed", "3"])
        .arg("--eta")
        .arg(&eta)
        .arg("--csv")
        .arg(&csv));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["trials"].as_u64().unwrap(), 4);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 5);
    assert!(csv_text.starts_with("trial,pi_seed,commutant_dim"));

    // Tensor of the representation with itself is reducible.
    let tens = dir.join("tens.json");
    let out = run(frep()
        .args(["rep", "tensor"])
        .arg("--a")
        .arg(&eta)
        .arg("--b")
        .arg(&eta)
        .arg("--out")
        .arg(&tens));
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(frep().args(["irr", "test"]).arg("--rep").arg(&tens));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!report["result"]["is_irreducible"].as_bool().unwrap());
}

#[test]
fn convolve_emits_loadable_element() {
    let dir = workdir("convolve");
    let a = write(
        &dir,
        "a.json",
        r#"{"k": 2, "terms": [{"word": "a", "re": 1.0, "im": 0.0}, {"word": "b", "re": 1.0, "im": 0.0}]}"#,
    );
    let prod = dir.join("prod.json");
    let out = run(frep()
        .args(["algebra", "convolve"])
        .arg("--a")
        .arg(&a)
        .arg("--b")
        .arg(&a)
        .arg("--out")
        .arg(&prod));
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(frep().args(["algebra", "norms"]).arg("--f").arg(&prod));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["l1"].as_f64().unwrap(), 4.0);
    assert_eq!(report["result"]["radius"].as_u64().unwrap(), 2);
}

#[test]
fn env_variables_override_defaults() {
    let dir = workdir("env");
    let f = write(&dir, "f.json", SYMMETRIC_F);
    let out = run(frep()
        .args(["norm", "interval", "--radius", "4"])
        .arg("--f")
        .arg(&f)
        .env("FREP_SEED", "99")
        .env("FREP_ITERS", "12"));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["config"]["seed"].as_u64().unwrap(), 99);
    assert_eq!(report["config"]["iters"].as_u64().unwrap(), 12);
}

#[test]
fn config_file_supplies_lab_fields() {
    let dir = workdir("config");
    let eta = dir.join("eta.json");
    run(frep()
        .args(["rep", "haar", "--k", "2", "--d", "2", "--seed", "21"])
        .arg("--out")
        .arg(&eta));
    let cfg = write(
        &dir,
        "cfg.json",
        &format!(
            r#"{{"eta": {:?}, "pi_dim": 2, "trials": 3, "seed": 5}}"#,
            eta.display().to_string()
        ),
    );
    let out = run(frep().args(["lab", "genericity", "--config"]).arg(&cfg));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["trials"].as_u64().unwrap(), 3);

    // Flags override config values.
    let out = run(frep()
        .args(["lab", "genericity", "--trials", "2", "--config"])
        .arg(&cfg));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["trials"].as_u64().unwrap(), 2);
}

/// Everything except the wall time must be byte-identical across
/// re-runs with the same configuration.
fn strip_wall_time(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("wall_time_s"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reruns_are_byte_identical() {
    let dir = workdir("rerun");
    let f = write(&dir, "f.json", SYMMETRIC_F);
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = run(frep()
            .args(["norm", "interval", "--radius", "8", "--seed", "7"])
            .arg("--f")
            .arg(&f));
        assert!(out.status.success());
        texts.push(strip_wall_time(&stdout(&out)));
    }
    assert_eq!(texts[0], texts[1]);

    let eta = dir.join("eta.json");
    run(frep()
        .args(["rep", "haar", "--k", "2", "--d", "2", "--seed", "4"])
        .arg("--out")
        .arg(&eta));
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = run(frep()
            .args(["lab", "membership", "--pi-haar-dim", "2", "--seed", "8", "--j", "0", "--k", "1", "--dyadic", "1,2"])
            .arg("--eta")
            .arg(&eta));
        assert!(out.status.success(), "{}", stderr(&out));
        texts.push(strip_wall_time(&stdout(&out)));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn lab_chain_and_cyclicity_commands_run() {
    let dir = workdir("lab-run");
    let eta = dir.join("eta.json");
    // The 2x2 example pair as an explicit file.
    write(
        &dir,
        "eta.json",
        r#"{"k": 2, "d": 2, "gens": [
            [[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]],
            [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]
        ]}"#,
    );
    let out = run(frep()
        .args([
            "lab", "chain", "--pi-n-haar-dim", "2", "--total-dim", "6", "--delta", "0.3",
            "--budget", "4", "--seed", "41", "--eps-j", "0.001", "--eps-k", "0.005",
        ])
        .arg("--eta")
        .arg(&eta));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["passed"].as_bool(), Some(true));

    let out = run(frep()
        .args([
            "lab", "cyclicity", "--pi-haar-dim", "3", "--trials", "5", "--seed", "13",
            "--epsilon", "0.3", "--probes", "64", "--budget", "4",
        ])
        .arg("--eta")
        .arg(&eta));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["result"]["passed"].as_u64().unwrap() >= 4);

    let out = run(frep()
        .args([
            "lab", "density", "--pi-haar-dim", "3", "--j", "0", "--k", "1",
            "--delta", "0.2", "--dims", "2,3", "--seed", "17",
        ])
        .arg("--eta")
        .arg(&eta));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["result"].as_array().unwrap().len() == 2);

    let out = run(frep()
        .args([
            "lab", "membership", "--pi-haar-dim", "2", "--seed", "23",
            "--j-list", "0,1", "--k-list", "2", "--dyadic", "1,2",
        ])
        .arg("--eta")
        .arg(&eta));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn deficit_command_reports_rows() {
    let dir = workdir("deficit");
    let rep = dir.join("rep.json");
    run(frep()
        .args(["rep", "haar", "--k", "2", "--d", "4", "--seed", "2"])
        .arg("--out")
        .arg(&rep));
    let csv = dir.join("rows.csv");
    let out = run(frep()
        .args([
            "norm", "deficit", "--sample", "5", "--sample-radius", "2", "--radius", "4",
            "--iters", "30", "--seed", "6",
        ])
        .arg("--rep")
        .arg(&rep)
        .arg("--csv")
        .arg(&csv));
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["result"]["rows"].as_array().unwrap().len(), 5);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 6);
}
