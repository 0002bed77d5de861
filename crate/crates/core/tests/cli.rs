use std::path::Path;
use std::process::{Command, Output};

fn qvf(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qvf"));
    c.args(args).env_remove("QVF_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn small() -> Vec<&'static str> {
    vec!["--set", "qv.count=4", "--set", "shots=100"]
}

fn run_in(dir: &Path, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let out = dir.to_str().unwrap().to_string();
    let mut a = small();
    a.extend_from_slice(extra);
    a.extend(["qv", "--out", Box::leak(out.into_boxed_str())]);
    qvf(&a, env)
}

#[test]
fn qv_exit_codes_follow_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let fail = run_in(&dir.path().join("noisy"), &["--set", "noise_scale=10"], &[]);
    assert_eq!(code(&fail), 4, "{}", String::from_utf8_lossy(&fail.stderr));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));
    let pass = run_in(&dir.path().join("clean"), &["--set", "noise_scale=0", "--set", "qv.count=40", "--set", "shots=400"], &[]);
    assert_eq!(code(&pass), 0, "{}", String::from_utf8_lossy(&pass.stdout));
}

#[test]
fn config_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("x");
    for extra in [&["--set", "shots=0"][..], &["--set", "device=builtin:nowhere"], &["--set", "qv.width"], &["--set", "nosuch=1"]] {
        let o = run_in(&d, extra, &[]);
        assert_eq!(code(&o), 2, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&run_in(&d, &[], &[("QVF_THREADS", "many")])), 2);
    assert_eq!(code(&qvf(&["--config", "/no/such/config.json", "gen", "--out", d.to_str().unwrap()], &[])), 2);
}

#[test]
fn stage_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let o = qvf(&["transpile", "--input", &p("absent"), "--out", &p("t")], &[]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = qvf(&["report", "--results", &p("absent.json"), "--out", &p("r.json")], &[]);
    assert_eq!(code(&o), 3);
}

#[test]
fn staged_cli_matches_qv_and_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let s = small();
    let with = |rest: &[&str]| {
        let mut a = s.clone();
        a.extend_from_slice(rest);
        let o = qvf(&a, &[("QVF_THREADS", "2")]);
        assert!(matches!(code(&o), 0 | 4), "{rest:?}: {}", String::from_utf8_lossy(&o.stderr));
        o
    };
    with(&["gen", "--out", &p("gen")]);
    with(&["transpile", "--input", &p("gen"), "--out", &p("tr"), "--synth-report", &p("synth.csv")]);
    with(&["schedule", "--input", &p("tr"), "--out", &p("sc"), "--timeline-dir", &p("tl")]);
    with(&["simulate", "--input", &p("sc"), "--out", &p("results.json")]);
    with(&["report", "--results", &p("results.json"), "--out", &p("report.json"), "--trace-csv", &p("trace.csv")]);
    run_in(&dir.path().join("e2e1"), &[], &[("QVF_THREADS", "1")]);
    run_in(&dir.path().join("e2e3"), &[], &[("QVF_THREADS", "3")]);
    let r = std::fs::read(p("report.json")).unwrap();
    assert_eq!(r, std::fs::read(p("e2e1/report.json")).unwrap());
    assert_eq!(r, std::fs::read(p("e2e3/report.json")).unwrap());
    assert!(Path::new(&p("tl/timeline_0000.csv")).exists());
    assert!(Path::new(&p("synth.csv")).exists());
}

#[test]
fn ab_subcommands_write_json() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["dd-ab", "router-ab"] {
        let out = dir.path().join(format!("{cmd}.json"));
        let mut a = small();
        a.extend([cmd, "--out", out.to_str().unwrap()]);
        let o = qvf(&a, &[]);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        assert_eq!(v["n"], 4);
    }
}
