use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mfxwl::synth::analytic_zeta_single;

fn mfxwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfxwl"))
        .args(args)
        .env_remove("MFXWL_THREADS")
        .output()
        .expect("spawn mfxwl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cascade_file(dir: &Path, name: &str, p: f64, iterations: u32) -> std::path::PathBuf {
    let out = dir.join(name);
    let o = mfxwl(&[
        "synth",
        "cascade",
        "--p",
        &p.to_string(),
        "--iterations",
        &iterations.to_string(),
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn missing_file_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-file.csv");
    let o = mfxwl(&["analyze", path(&missing), path(&missing), "--out", path(&dir.path().join("out"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no-such-file.csv"), "{}", stderr(&o));
}

#[test]
fn fit_range_beyond_available_scales_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let x = cascade_file(dir.path(), "x.csv", 0.3, 10);
    let o = mfxwl(&[
        "analyze",
        path(&x),
        path(&x),
        "--fit-range",
        "3:11",
        "--out",
        path(&dir.path().join("out")),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("fit range exceeds available scales"), "{}", stderr(&o));
}

#[test]
fn config_file_fit_range_is_checked_too() {
    let dir = tempfile::tempdir().unwrap();
    let x = cascade_file(dir.path(), "x.csv", 0.3, 10);
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"fit_range": {"lo": 2, "hi": 12}}"#).unwrap();
    let o = mfxwl(&["analyze", path(&x), path(&x), "--config", path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("fit range exceeds available scales"));
}

#[test]
fn small_cascade_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = cascade_file(dir.path(), "c.csv", 0.3, 4);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 16);
    let total: f64 = rows.iter().map(|r| r[0].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c.csv.json")).unwrap()).unwrap();
    assert_eq!(sidecar["kind"], "cascade");
    assert_eq!(sidecar["length"], 16);
}

#[test]
fn cascade_pair_has_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pair.csv");
    let o = mfxwl(&["synth", "cascade", "--p-x", "0.3", "--p-y", "0.4", "--iterations", "6", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r.len() == 2));
}

#[test]
fn inadmissible_bfbm_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = mfxwl(&[
        "synth", "bfbm", "--hurst-x", "0.1", "--hurst-y", "0.9", "--rho", "0.99", "--n", "1024", "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("inadmissible"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn bfbm_is_reproducible_from_its_seed() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = mfxwl(&[
            "synth", "bfbm", "--hurst-x", "0.5", "--hurst-y", "0.8", "--rho", "-0.3", "--n", "4096", "--seed",
            seed, "--out", path(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(&out).unwrap()
    };
    let a = gen("a.csv", "11");
    assert_eq!(a, gen("b.csv", "11"));
    assert_ne!(a, gen("c.csv", "12"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 11);
    assert_eq!(sidecar["spec"]["rho"], -0.3);
}

#[test]
fn identical_cascades_follow_single_measure_law() {
    let dir = tempfile::tempdir().unwrap();
    let x = cascade_file(dir.path(), "x.csv", 0.3, 14);
    let out = dir.path().join("out");
    let o = mfxwl(&["analyze", path(&x), path(&x), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_csv(&out.join("diagonal.csv"));
    assert_eq!(rows[0][..3], ["q", "zeta", "r2"]);
    assert!(rows.len() > 10);
    for r in &rows[1..] {
        let (q, z): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((z - analytic_zeta_single(0.3, q)).abs() <= 0.1, "q={q} zeta={z}");
    }
}

#[test]
fn header_and_named_columns() {
    let dir = tempfile::tempdir().unwrap();
    let src = cascade_file(dir.path(), "pair.csv", 0.3, 10);
    let body = fs::read_to_string(&src).unwrap();
    let named = dir.path().join("named.csv");
    let text: String = body.lines().map(|l| format!("{l};{l}\n")).collect();
    fs::write(&named, format!("a;b\n{text}")).unwrap();
    let out = dir.path().join("out");
    let o = mfxwl(&[
        "analyze", path(&named), path(&named), "--header", "--delimiter", ";", "--x-column", "a", "--y-column", "b",
        "--q-range", "-2:2", "--p-range", "-2:2", "--step", "1", "--out", path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(read_csv(&out.join("zeta.csv")).len(), 1 + 25);

    let o = mfxwl(&["analyze", path(&named), path(&named), "--header", "--delimiter", ";", "--column", "c"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn manifest_rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let x = cascade_file(dir.path(), "x.csv", 0.3, 11);
    let y = cascade_file(dir.path(), "y.csv", 0.4, 11);
    let first = dir.path().join("first");
    let o = mfxwl(&["analyze", path(&x), path(&y), "--boundary", "clamp", "--step", "1", "--out", path(&first)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let second = dir.path().join("second");
    let o = mfxwl(&["analyze", "--manifest", path(&first.join("manifest.json")), "--out", path(&second)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["partition.csv", "zeta.csv", "spectrum_legendre.csv", "spectrum_direct.csv", "diagonal.csv", "summary.json", "manifest.json"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }

    fs::write(&x, "1\n2\n").unwrap();
    let o = mfxwl(&["analyze", "--manifest", path(&first.join("manifest.json")), "--out", path(&second)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_mfxwl"))
        .args(["synth", "cascade", "--p", "0.3", "--iterations", "3", "--out", "/dev/null"])
        .env("MFXWL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("MFXWL_THREADS"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&mfxwl(&["analyze"])), 3);
    assert_eq!(code(&mfxwl(&["analyze", "a", "b", "--boundary", "mirror"])), 3);
    assert_eq!(code(&mfxwl(&["--help"])), 0);
}

#[test]
fn wrong_normalization_fails_zeta_checks() {
    let o = mfxwl(&["validate", "--normalization", "l2", "--realizations", "1"]);
    assert_eq!(code(&o), 5);
    let table = String::from_utf8_lossy(&o.stdout);
    for line in table.lines().filter(|l| l.contains("zeta")) {
        assert!(line.starts_with("FAIL"), "{line}");
    }
    assert!(table.lines().any(|l| l.starts_with("FAIL binomial diagonal")));
}
