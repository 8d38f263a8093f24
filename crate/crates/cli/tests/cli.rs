use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lfscatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfscatter")).args(args).output().expect("binary runs")
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn exact_run_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exact");
    ok(lfscatter(&["run", "--algorithm", "exact", "--steps", "25", "--out", out.to_str().unwrap()]));
    let obs = fs::read_to_string(out.join("observables.csv")).unwrap();
    assert_eq!(obs.lines().next().unwrap(), "step,x_plus,p_perp_sq,P_red,P_green,P_blue");
    assert_eq!(obs.lines().count(), 27);
    assert!(out.join("probabilities.csv").exists());
    let m = manifest(&out);
    assert_eq!(m["status"], "complete");
    let lambda = m["lambda"].as_f64().unwrap();
    let tau = m["tau"].as_f64().unwrap();
    assert!((lambda * tau - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn tts_manifest_reports_27_qubits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tts");
    ok(lfscatter(&["run", "--algorithm", "tts", "--K", "3", "--steps", "0", "--out", out.to_str().unwrap()]));
    assert_eq!(manifest(&out)["qubits"]["total"], 27);
    assert_eq!(fs::read_to_string(out.join("observables.csv")).unwrap().lines().count(), 2);
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        ok(lfscatter(&[
            "run",
            "--algorithm",
            "tts-matrix",
            "--steps",
            "5",
            "--shots",
            "1000",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]));
        (fs::read(out.join("observables.csv")).unwrap(), fs::read(out.join("probabilities.csv")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn compare_against_self_is_zero_and_against_exact_is_not() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("matrix");
    let b = tmp.path().join("exact");
    ok(lfscatter(&["run", "--algorithm", "tts-matrix", "--steps", "10", "--out", a.to_str().unwrap()]));
    ok(lfscatter(&["run", "--algorithm", "exact", "--steps", "10", "--out", b.to_str().unwrap()]));
    let self_out = tmp.path().join("self.csv");
    ok(lfscatter(&["compare", a.to_str().unwrap(), a.to_str().unwrap(), "--out", self_out.to_str().unwrap()]));
    for line in fs::read_to_string(&self_out).unwrap().lines().skip(1) {
        for cell in line.split(',').skip(2).filter(|c| !c.is_empty()) {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0);
        }
    }
    ok(lfscatter(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]));
    let dev = fs::read_to_string(a.join("deviations.csv")).unwrap();
    let last: f64 = dev.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(last.is_finite() && last > 0.0);
}

#[test]
fn grid_mismatch_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(lfscatter(&["run", "--steps", "3", "--out", a.to_str().unwrap()]));
    ok(lfscatter(&["run", "--steps", "4", "--out", b.to_str().unwrap()]));
    let out = lfscatter(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let out = tmp.path().join("trotter");
    fs::write(
        &cfg,
        format!("seed = 3\n\n[engine]\nalgorithm = \"trotter\"\nsteps = 4\n\n[output]\ndir = {:?}\n", out),
    )
    .unwrap();
    ok(lfscatter(&["run", "--config", cfg.to_str().unwrap(), "--steps", "2"]));
    assert_eq!(fs::read_to_string(out.join("observables.csv")).unwrap().lines().count(), 4);
    assert_eq!(manifest(&out)["seed"], 3);
}

#[test]
fn sweep_writes_one_directory_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    ok(lfscatter(&["run", "--steps", "2", "--seed", "4", "--sweep", "3", "--out", out.to_str().unwrap()]));
    for seed in 4..7 {
        assert!(out.join(format!("seed-{seed}")).join("observables.csv").exists());
    }
}

#[test]
fn invalid_configuration_is_reported() {
    let out = lfscatter(&["run", "--algorithm", "exact", "--tau-prime", "1.0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau_prime"));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[engine]\nunknown_key = 1\n").unwrap();
    assert!(!lfscatter(&["run", "--config", cfg.to_str().unwrap()]).status.success());
    assert!(!lfscatter(&["run", "--algorithm", "annealing"]).status.success());
}

#[test]
fn readme_config_example_runs() {
    let readme = include_str!("../../../README.md");
    let start = readme.find("```toml\n").unwrap() + 8;
    let body = &readme[start..start + readme[start..].find("```").unwrap()];
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, body).unwrap();
    ok(lfscatter(&["run", "--config", cfg.to_str().unwrap(), "--steps", "2", "--out", out.to_str().unwrap()]));
    assert_eq!(manifest(&out)["seed"], 7);
}
