use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use warpcheck::report::revalidate;

fn warpcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).expect("report exists")).expect("valid json")
}

fn metric(r: &Value, key: &str) -> f64 {
    r["metrics"][key]
        .as_str()
        .expect("string metric")
        .parse()
        .unwrap()
}

#[test]
fn sha_yang_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&[
        "sha-yang", "--n", "2", "--m", "3", "--T", "50", "--out", out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&dir.path().join("sha-yang.json"));
    assert!(metric(&r, "first_integral_residual") <= 1e-8);
    assert_eq!(r["config"]["params"]["T"], "50.0");
    assert_eq!(r["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(r["tolerances"]["asymptotic_bound"].is_string());
}

#[test]
fn neck_example_has_one_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&[
        "neck",
        "--nu",
        "0.1",
        "--n",
        "5",
        "--s",
        "0.5,0.25,0.1",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&dir.path().join("neck.json"));
    let deltas: Vec<_> = r["metrics"]
        .as_object()
        .unwrap()
        .keys()
        .filter(|k| k.contains("delta"))
        .collect();
    assert_eq!(deltas, ["delta"]);
    assert!(metric(&r, "delta") > 0.0);
}

#[test]
fn docking_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&["docking", "--n", "3", "--check-round", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = report(&dir.path().join("docking.json"));
    assert!(metric(&r, "max_component_spread") <= 1e-9);
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "round_sphere"));
}

#[test]
fn summary_has_one_line_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&["glue", "--out", out]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    let r = report(&dir.path().join("glue.json"));
    let checks = r["checks"].as_array().unwrap().len();
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("[PASS]")).count(),
        checks
    );
    assert!(stdout.lines().last().unwrap().contains("PASS"));
}

#[test]
fn exit_code_contract_for_every_scenario() {
    let forced: [&[&str]; 7] = [
        &["sha-yang", "--lambda", "1"],
        &["neck", "--s", "0.5", "--lambda", "1"],
        &["closability", "--lambda", "1000000"],
        &["gn", "--grid", "2000", "--lambda", "1"],
        &["docking", "--lambda", "100"],
        &["limit-space", "--lambda", "100"],
        &[
            "glue",
            "--radius-a",
            "1",
            "--kappa-a",
            "-1",
            "--radius-b",
            "1",
            "--kappa-b",
            "0",
        ],
    ];
    for args in forced {
        let dir = tempfile::tempdir().unwrap();
        let mut full = args.to_vec();
        full.extend(["--out", dir.path().to_str().unwrap()]);
        let o = warpcheck(&full);
        assert_eq!(
            code(&o),
            1,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let written: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(written.len(), 1, "{args:?}");
        let r = report(&written[0].as_ref().unwrap().path());
        assert_eq!(r["overall_pass"], false);
        assert!(!revalidate(&r).unwrap());
    }
}

#[test]
fn input_errors_write_nothing() {
    let bad: [&[&str]; 6] = [
        &["sha-yang", "--n", "1"],
        &["sha-yang", "--nu", "0.1"],
        &["neck", "--s", "1000"],
        &["gn", "--rho", "-10"],
        &["export"],
        &["glue", "--radius-a", "1"],
    ];
    for args in bad {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut full = args.to_vec();
        full.extend(["--out", out.to_str().unwrap()]);
        let o = warpcheck(&full);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!out.exists(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&warpcheck(&["no-such-scenario"])), 2);
    assert_eq!(code(&warpcheck(&["docking", "--grid", "many"])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# docking run\nn = 4\ncheck-round = true\nlambda = 100\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let args = [
        "docking",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(code(&warpcheck(&args)), 1);
    let mut with_override = args.to_vec();
    with_override.extend(["--lambda", "0"]);
    assert_eq!(code(&warpcheck(&with_override)), 0);
    let r = report(&out.join("docking.json"));
    assert_eq!(r["config"]["params"]["n"], "4");
    assert_eq!(r["config"]["params"]["lambda"], "0.0");
    assert_eq!(r["config"]["params"]["check_round"], true);

    fs::write(&cfg, "n = 4\nbogus = 1\n").unwrap();
    assert_eq!(code(&warpcheck(&args)), 2);
    assert_eq!(
        code(&warpcheck(&["docking", "--config", "/nonexistent/run.cfg"])),
        2
    );
}

#[test]
fn json_flag_prints_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&["closability", "--json", "--out", out]);
    assert_eq!(code(&o), 0);
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, report(&dir.path().join("closability.json")));
    assert!(revalidate(&printed).unwrap());
    assert!(metric(&printed, "c_star") > 0.0);
}

#[test]
fn csv_dumps_follow_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = warpcheck(&["gn", "--grid", "500", "--csv", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = report(&dir.path().join("gn.json"));
    let artifacts = r["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), 2);
    for a in artifacts {
        let text = fs::read_to_string(a.as_str().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,f,fp,fpp"));
        assert_eq!(lines.count(), 500);
    }
}

fn export_rows(args: &[&str]) -> Vec<Vec<f64>> {
    let dir = tempfile::tempdir().unwrap();
    let mut full = vec!["export"];
    full.extend_from_slice(args);
    full.extend(["--out", dir.path().to_str().unwrap()]);
    let o = warpcheck(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file = fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let mut rdr = csv::Reader::from_path(file).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "f", "fp", "fpp"]);
    rdr.records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn export_examples() {
    let f = export_rows(&["--profile", "sha-yang-f", "--points", "1001"]);
    assert_eq!(f.len(), 1001);
    assert_eq!(f[0][0], 0.0);

    let neck = export_rows(&["--profile", "neck", "--nu", "0.1", "--s", "0.5"]);
    assert_eq!(neck[0][0], 0.5);

    let k = export_rows(&["--profile", "k", "--eps", "0.2"]);
    let last = k.last().unwrap();
    assert_eq!(last[0], 0.2);
    assert!(last[2].abs() <= 1e-10);

    for p in ["sha-yang-h", "collar", "closability", "docking-r"] {
        assert_eq!(
            export_rows(&["--profile", p, "--points", "17"]).len(),
            17,
            "{p}"
        );
    }
}

#[test]
fn unwritable_output_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let out = out.to_str().unwrap();
    assert_eq!(
        code(&warpcheck(&["export", "--profile", "k", "--out", out])),
        2
    );
    assert_eq!(code(&warpcheck(&["glue", "--out", out])), 2);
}

#[test]
fn parallel_reports_match_sequential_ones() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq");
    let par = dir.path().join("par");
    assert_eq!(
        code(&warpcheck(&["sha-yang", "--out", seq.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&warpcheck(&[
            "sha-yang",
            "--parallel",
            "--out",
            par.to_str().unwrap()
        ])),
        0
    );
    let (mut a, mut b) = (
        report(&seq.join("sha-yang.json")),
        report(&par.join("sha-yang.json")),
    );
    for r in [&mut a, &mut b] {
        r["config"]["params"]["out"] = Value::Null;
        r["config"]["params"]["parallel"] = Value::Null;
    }
    assert_eq!(a, b);
}
