use std::fs;
use std::process::{Command, Output};

fn dtn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtn")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn branch_sweep_writes_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = dtn(&["branch", "--domain", "disc", "--k", "0", "--z-min", "-5", "--z-max", "40", "--count", "400", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,branch_k,value,tail_bound,pole_distance"));
    assert_eq!(lines.count(), 400);
    // no stray temp files next to the artifact
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn pole_rows_are_marked() {
    let j01_sq = "5.783185962946784";
    let o = dtn(&["branch", "--domain", "disc", "--z-min", "0", "--z-max", j01_sq, "--count", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert_eq!(last.split(',').nth(2), Some("pole"), "{text}");
}

#[test]
fn floats_have_seventeen_digits() {
    let o = dtn(&["spectrum", "--domain", "disc", "--e-max", "20"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let e = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = e.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{e}");
    assert!((e.parse::<f64>().unwrap() - 5.783185962946784).abs() < 1e-14);
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        vec!["branch", "--domain", "disc", "--z-min", "0", "--z-max", "1", "--count", "1"],
        vec!["branch", "--domain", "disc", "--z-min", "2", "--z-max", "1"],
        vec!["branch", "--domain", "disc", "--z-min", "0", "--z-max", "1", "--tol", "1e-3"],
        vec!["branch", "--domain", "torus", "--z-min", "0", "--z-max", "1"],
        vec!["spectrum", "--domain"],
        vec!["frobnicate"],
    ] {
        let o = dtn(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn numerical_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"n":2,"m":1,"E":[1,0,0,0],"J":[1,0],"seed":null}"#).unwrap();
    let o = dtn(&["model", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn io_errors_exit_one() {
    let o = dtn(&["spectrum", "--domain", "disc", "--e-max", "10", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&o), 1);
    let o = dtn(&["spectrum", "--config", "/nonexistent-dir/c.cfg", "--domain", "disc", "--e-max", "10"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "# sweep defaults\ndomain = disc\nz_min = -5\nz_max = 1\ncount = 7\n").unwrap();
    let o = dtn(&["branch", "--config", cfg.to_str().unwrap(), "--count", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
}

#[test]
fn positivity_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, threads) in [(&a, "1"), (&b, "3")] {
        let o = Command::new(env!("CARGO_BIN_EXE_dtn"))
            .args(["positivity", "--domain", "square", "--e-max", "200", "--out", p.to_str().unwrap()])
            .env("DTN_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&text).unwrap();
    let rows = v.as_array().unwrap();
    for r in rows {
        let ground = (r["E"].as_f64().unwrap() - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9;
        let expected = if ground && r["side"] == "left" { "PP" } else { "NotPP" };
        assert_eq!(r["verdict"], expected, "{r}");
    }
}

#[test]
fn bad_thread_count_is_an_argument_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_dtn"))
        .args(["spectrum", "--domain", "disc", "--e-max", "10"])
        .env("DTN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn model_suite_passes() {
    let o = dtn(&["model", "--n", "12", "--m", "4", "--trials", "50", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("true")));
}

#[test]
fn robin_offset_is_beta() {
    let o = dtn(&["robin", "--domain", "disc", "--beta", "0.5,3", "--k", "2", "--z-min", "-3", "--z-max", "20", "--count", "5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[4] - f[0]).abs() < 1e-11, "{line}");
    }
}

#[test]
fn laurent_matches_residue() {
    let o = dtn(&["laurent", "--domain", "disc", "--e-max", "150", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in v.as_array().unwrap() {
        assert!(r["relative_error"].as_f64().unwrap() < 1e-5, "{r}");
    }
}
