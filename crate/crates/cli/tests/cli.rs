use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn mutrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mutrans")).args(args).env_remove("MUTRANS_TOL_SCALE").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mutrans-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn check_passes_for_power_symbol() {
    let out = mutrans(&["check", "--symbol", "abs2pow(0.5)", "--mu", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["results"]["transmission"]["passed"], true);
}

#[test]
fn index_of_power_symbol() {
    let out = mutrans(&["index", "--symbol", "abs2pow(0.65)", "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let mu0 = report(&out)["results"]["mu0"]["re"].as_f64().unwrap();
    assert!((mu0 - 0.65).abs() < 1e-6, "{mu0}");
}

#[test]
fn interval_exponent_for_half_power() {
    let out = mutrans(&["solve-interval", "--a", "0.5", "--f", "const", "--N", "2048"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for side in ["left", "right"] {
        let a = r["results"][side]["alpha_hat"].as_f64().unwrap();
        assert!((0.45..=0.55).contains(&a), "{side}: {a}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(mutrans(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mutrans(&["check", "--mu", "0.5"]).status.code(), Some(1));
    assert_eq!(mutrans(&["check", "--symbol", "abs2pow(", "--mu", "0.5"]).status.code(), Some(1));
    assert_eq!(mutrans(&["check", "--bogus-flag"]).status.code(), Some(1));
    assert_eq!(mutrans(&["solve-interval", "--a", "2.5"]).status.code(), Some(1));
    assert_eq!(mutrans(&["--help"]).status.code(), Some(0));
    // a symbol of the wrong type is a tolerance failure, not a usage error
    let out = mutrans(&["check", "--symbol", "abs2pow(0.5)", "--mu", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["verdicts"][0]["passed"], false);
}

#[test]
fn reports_are_deterministic() {
    let args = ["solve-halfline", "--a", "0.5", "--sigma", "2", "--N", "2048", "--L", "40"];
    let (a, b) = (mutrans(&args), mutrans(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timings(report(&a)), without_timings(report(&b)));
    let strip = |o: &Output| {
        let s = String::from_utf8(o.stdout.clone()).unwrap();
        s[..s.find("\"timings\"").unwrap()].to_string()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn replay_reruns_recorded_inputs() {
    let dir = scratch("replay");
    let first = dir.join("first.json");
    let out = mutrans(&["factorize", "--symbol", "abs2pow(0.3)", "--sigma", "1.5", "--out", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let again = mutrans(&["--replay", first.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(without_timings(a), without_timings(report(&again)));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "sigma = 3\n[index]\nsymbol = abs2pow(0.4)\n[check]\nsymbol = abs2pow(9)\n").unwrap();
    let out = mutrans(&["index", "--config", cfg.to_str().unwrap(), "--symbol", "chiplus(0.7)"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["inputs"]["symbol"], "chiplus(0.7)");
    assert_eq!(r["inputs"]["sigma"].as_f64(), Some(3.0));
    assert!((r["results"]["mu0"]["re"].as_f64().unwrap() - 0.7).abs() < 1e-6);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn grid_dump_feeds_fit_exponent() {
    let dir = scratch("dump");
    let grid = dir.join("u.csv");
    let out = mutrans(&["solve-interval", "--a", "0.7", "--N", "512", "--dump-grid", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let fit = mutrans(&["fit-exponent", "--input", grid.to_str().unwrap(), "--a", "0.7"]);
    assert_eq!(fit.status.code(), Some(0));
    let r = report(&fit);
    let direct = report(&out);
    assert_eq!(r["results"]["left"]["alpha_hat"], direct["results"]["left"]["alpha_hat"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn trace_of_poisson_field() {
    let out = mutrans(&["trace", "--mu", "0.3", "--phi", "2", "--M", "2", "--N", "8192"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let re = report(&out)["results"]["traces_limit"][0]["re"].as_f64().unwrap();
    assert!((re - 2.0).abs() < 1e-6);
}

#[test]
fn matrix_dump_layout() {
    let dir = scratch("matrix");
    let m = dir.join("a.bin");
    let out = mutrans(&["solve-interval", "--a", "0.5", "--N", "512", "--dump-matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(&m).unwrap();
    assert_eq!(&bytes[..4], b"MTRI");
    assert_eq!(bytes.len(), 4 + 8 + 8 + 1 + 8 + 511 * 511 * 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tolerance_scale_flag_loosens_verdicts() {
    let tight = mutrans(&["check", "--symbol", "abs2pow(0.5)", "--mu", "0.2"]);
    assert_eq!(tight.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_mutrans"))
        .args(["index", "--symbol", "abs2pow(0.65)", "--mu", "0.65"])
        .env("MUTRANS_TOL_SCALE", "2")
        .output()
        .unwrap();
    let r = report(&out);
    assert_eq!(r["verdicts"][1]["tolerance"].as_f64(), Some(2e-6));
}
