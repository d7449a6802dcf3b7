use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iotsense(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iotsense"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_wall_time(mut v: Value) -> Value {
    v["metrics"].as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn generate_then_rpca_writes_a_converged_report() {
    let dir = tempfile::tempdir().unwrap();
    let gen = iotsense(&["generate", "--rows", "100", "--cols", "100", "--rank", "5", "--seed", "42", "-o", "data/"], dir.path());
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    for f in ["observed.csv", "mask.csv", "truth_x.csv", "truth_a.csv", "scenario.json"] {
        assert!(dir.path().join("data").join(f).exists(), "{f} missing");
    }
    let run = iotsense(&["rpca", "-i", "data/", "-o", "report.json"], dir.path());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let r = report(&dir.path().join("report.json"));
    assert_eq!(r["command"], "rpca");
    assert_eq!(r["converged"], true);
    assert!(r["metrics"]["relative_error"].as_f64().unwrap() < 1e-3);
    assert!(!r["histories"]["residual"].as_array().unwrap().is_empty());
}

#[test]
fn missing_input_exits_one_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = iotsense(&["rpca", "-i", "nowhere.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(iotsense(&["rpca"], dir.path()).status.code(), Some(1));
    assert_eq!(iotsense(&["rpca", "-i", "x", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(iotsense(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn decentralized_consensus_reports_residual_histories() {
    let dir = tempfile::tempdir().unwrap();
    let ring: String = (0..8).map(|i| format!("{} {}\n", i, (i + 1) % 8)).collect();
    std::fs::write(dir.path().join("ring8.edges"), ring).unwrap();
    let out = iotsense(&["consensus", "--topology", "ring8.edges", "--objective", "quadratic", "--seed", "7", "-o", "c.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("c.json"));
    let primal = r["histories"]["primal_residual"].as_array().unwrap();
    let dual = r["histories"]["dual_residual"].as_array().unwrap();
    assert!(!primal.is_empty());
    assert_eq!(primal.len(), dual.len());
    assert_eq!(r["seed"], 7);
}

#[test]
fn completion_handles_missing_entries_and_rpca_refuses_them() {
    let dir = tempfile::tempdir().unwrap();
    let gen = iotsense(&["generate", "--rows", "60", "--cols", "50", "--rank", "3", "--missing-frac", "0.2", "--seed", "3", "-o", "d"], dir.path());
    assert!(gen.status.success());
    let out = iotsense(&["complete", "-i", "d", "-o", "r.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&dir.path().join("r.json"))["converged"], true);
    let refused = iotsense(&["rpca", "-i", "d"], dir.path());
    assert_eq!(refused.status.code(), Some(1));
}

#[test]
fn strict_mode_exits_two_when_the_solver_stops_early() {
    let dir = tempfile::tempdir().unwrap();
    iotsense(&["generate", "--rows", "40", "--cols", "40", "--rank", "2", "-o", "d"], dir.path());
    let lax = iotsense(&["rpca", "-i", "d", "--max-iters", "1", "-o", "lax.json"], dir.path());
    assert_eq!(lax.status.code(), Some(0));
    assert_eq!(report(&dir.path().join("lax.json"))["converged"], false);
    let strict = iotsense(&["rpca", "-i", "d", "--max-iters", "1", "--strict"], dir.path());
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn fuse_kernel_and_denoise_produce_reports() {
    let dir = tempfile::tempdir().unwrap();
    let fuse = iotsense(&["fuse", "--train", "300", "--trials", "300", "--seed", "2", "-o", "f.json"], dir.path());
    assert!(fuse.status.success(), "{}", String::from_utf8_lossy(&fuse.stderr));
    let extra = &report(&dir.path().join("f.json"))["metrics"]["extra"];
    assert!(extra["auc_copula"].as_f64().unwrap() > 0.5);

    let kernel = iotsense(&["kernel", "--bandwidth", "1", "--seed", "6", "-o", "k.json"], dir.path());
    assert!(kernel.status.success(), "{}", String::from_utf8_lossy(&kernel.stderr));
    let extra = &report(&dir.path().join("k.json"))["metrics"]["extra"];
    assert_eq!(extra["training_accuracy"].as_f64().unwrap(), 1.0);

    iotsense(&["generate", "--rows", "30", "--cols", "20", "--rank", "2", "-o", "d"], dir.path());
    let den = iotsense(&["pca-denoise", "-i", "d/truth_x.csv", "--tau", "1e-6", "-o", "p.json"], dir.path());
    assert!(den.status.success(), "{}", String::from_utf8_lossy(&den.stderr));
    assert_eq!(report(&dir.path().join("p.json"))["metrics"]["extra"]["rank"], 2.0);
}

#[test]
fn reruns_are_identical_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = iotsense(&["consensus", "--objective", "least-squares", "--agents", "3", "--dim", "3", "--seed", "5", "-o", name], dir.path());
        assert!(out.status.success());
        without_wall_time(report(&dir.path().join(name)))
    };
    assert_eq!(run("a.json"), run("b.json"));
}
