use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cregsa");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("CREGSA_OUTPUT_DIR", out)
        .output()
        .unwrap()
}

#[test]
fn list_models_names_every_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["list-models"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "ishigami",
        "risk_fault_tree",
        "bearing_a_iso",
        "appendix_b",
        "appendix_c",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn analyze_is_byte_identical_across_processes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("bearing.cfg");
    let args = [
        "analyze",
        cfg.to_str().unwrap(),
        "--n",
        "4000",
        "--grid",
        "10,10",
        "--m",
        "200",
    ];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    for f in [
        "report.json",
        "indices.csv",
        "decomposition.csv",
        "costs.csv",
    ] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    assert!(a.path().join("timing.json").exists());
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["metadata"]["n"], 4000);
    assert_eq!(report["metadata"]["grid"]["i"], 10);
    assert_eq!(report["metadata"]["grid"]["m"], 200);
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn sequential_flag_gives_the_same_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("ishigami.cfg");
    let base = [
        "analyze",
        cfg.to_str().unwrap(),
        "--n",
        "3000",
        "--seed",
        "5",
    ];
    assert!(run(&base, a.path()).status.success());
    let mut seq = base.to_vec();
    seq.push("--sequential");
    assert!(run(&seq, b.path()).status.success());
    assert_eq!(
        fs::read(a.path().join("report.json")).unwrap(),
        fs::read(b.path().join("report.json")).unwrap()
    );
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.cfg");
    fs::write(&empty, "model = \"ishigami\"\nn = 2000\nmethods = []\n").unwrap();
    let bad_model = dir.path().join("bad.cfg");
    fs::write(
        &bad_model,
        "model = \"nope\"\nn = 2000\nmethods = [\"kappa\"]\n",
    )
    .unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["analyze".into(), empty.display().to_string()],
        vec!["analyze".into(), bad_model.display().to_string()],
        vec![
            "analyze".into(),
            dir.path().join("missing.cfg").display().to_string(),
        ],
        vec![
            "analyze".into(),
            config("ishigami.cfg").display().to_string(),
            "--n".into(),
            "10".into(),
        ],
        vec![
            "analyze".into(),
            config("ishigami.cfg").display().to_string(),
            "--grid".into(),
            "10".into(),
        ],
        vec![
            "converge".into(),
            config("appendix_b.cfg").display().to_string(),
            "--sizes".into(),
            "1000,100".into(),
        ],
        vec![
            "converge".into(),
            config("appendix_b.cfg").display().to_string(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = run(&args, dir.path());
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(!o.stderr.is_empty(), "{args:?} printed no diagnostic");
    }
}

#[test]
fn converge_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("appendix_b.cfg");
    let o = run(
        &[
            "converge",
            cfg.to_str().unwrap(),
            "--sizes",
            "500,1000,2000",
            "--repeats",
            "3",
            "--target",
            "conditional:X2",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "target,size,repeats,mean,sd,min,max,mean_time_ms");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("conditional:X2,500,3,"));
}
