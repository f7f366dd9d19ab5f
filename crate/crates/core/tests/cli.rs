use std::path::Path;
use std::process::{Command, Output};

fn edlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn edlab")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn list_scenarios_prints_five_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = edlab(&["list-scenarios"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, ["free_packet", "double_slit", "ho_1d", "ho_2d_rotating", "ho_2d_breathing"]);
}

#[test]
fn bad_config_exits_two_without_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "scenario = free_packet\nsigma0 = -1\noutput_dir = out\n",
        "scenario = warp_drive\noutput_dir = out\n",
        "scenario = free_packet\ncolour = blue\noutput_dir = out\n",
        "sigma0 = 1\noutput_dir = out\n",
        "scenario = free_packet\nscenario = ho_1d\noutput_dir = out\n",
    ];
    for text in cases {
        let cfg = write(dir.path(), "bad.cfg", text);
        let out = edlab(&["run", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(out.stdout.is_empty());
        assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
        assert!(!dir.path().join("out/manifest.json").exists(), "{text}");
    }
}

#[test]
fn missing_file_and_bad_usage_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(edlab(&["run", "nope.cfg"], dir.path()).status.code(), Some(2));
    assert_eq!(edlab(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(edlab(&["verify", "--suite", "slow"], dir.path()).status.code(), Some(2));
}

#[test]
fn run_writes_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "scenario = free_packet\ntimes = 0, 1, 2\noutput_dir = out\n");
    let out = edlab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["all_passed"], true);
    for k in 0..3 {
        assert!(dir.path().join(format!("out/snapshot_{k:03}.csv")).exists());
        assert!(dir.path().join(format!("out/snapshot_{k:03}.svg")).exists());
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = free_packet\nparticles = 500\nsteps = 20\ndt = 0.01\nseed = 1\noutput_dir = OUT\n";
    let mut hist = Vec::new();
    for (tag, seed) in [("a", None), ("b", Some("1")), ("c", Some("2"))] {
        let cfg = write(dir.path(), &format!("{tag}.cfg"), &text.replace("OUT", tag));
        let mut args = vec!["sample", cfg.as_str()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        let out = edlab(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        hist.push(std::fs::read(dir.path().join(tag).join("final_positions.csv")).unwrap());
    }
    assert_eq!(hist[0], hist[1]);
    assert_ne!(hist[0], hist[2]);
}

#[test]
fn infer_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.cfg", "prior = 0.0005, 0.9995\nlikelihood = 0.99, 0.01\n");
    let out = edlab(&["infer", "bayes", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["posterior"][0].as_f64().unwrap() - 0.047).abs() < 5e-4);

    let cfg = write(dir.path(), "m.cfg", "outcomes = 6\nfeature1 = 1, 2, 3, 4, 5, 6\ntarget1 = 3.5\n");
    let out = edlab(&["infer", "maxent", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for p in v["distribution"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
    }

    let cfg = write(dir.path(), "x.cfg", "prior = 0.5, 0.5\n");
    assert_eq!(edlab(&["infer", "bayes", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn verify_exit_code_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = edlab(&["verify", "--suite", "fast"], dir.path());
    let err = String::from_utf8(out.stderr).unwrap();
    let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(lines.len(), 8);
    let failed = lines.iter().any(|l| l.contains(" FAIL "));
    assert_eq!(out.status.code(), Some(if failed { 1 } else { 0 }));
}
