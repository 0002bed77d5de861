use qvf::pipeline::*;
use qvf::QvfError;
use std::path::Path;

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig::default()
        .with_overrides(&[
            "qv.count=6".into(),
            "shots=200".into(),
            format!("out={}", out.display()),
        ])
        .unwrap()
}

fn bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn config_defaults_and_overrides() {
    let d = ExperimentConfig::default();
    assert_eq!((d.qv.width, d.qv.depth), (6, 6));
    assert!(d.dd);
    let back = ExperimentConfig::from_json(&d.to_json()).unwrap();
    assert_eq!(back.hash(), d.hash());
    let c = d.with_overrides(&["qv.count=12".into(), "routing.fb=0.98".into(), "dd=false".into(), "method=heuristic".into()]).unwrap();
    assert_eq!(c.qv.count, 12);
    assert_eq!(c.routing.fb, 0.98);
    assert!(!c.dd);
    assert_ne!(c.hash(), d.hash());
    let moved = d.with_overrides(&["out=/somewhere/else".into()]).unwrap();
    assert_eq!(moved.hash(), d.hash());
    for bad in ["qv.count", "nosuch.key=1", "shots=lots"] {
        assert!(matches!(d.with_overrides(&[bad.into()]), Err(QvfError::Config(_))), "{bad}");
    }
    assert!(d.with_overrides(&["shots=0".into()]).unwrap().check().is_err());
    assert!(d.with_overrides(&["device=builtin:nowhere".into()]).unwrap().device_model().is_err());
}

#[test]
fn config_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("exp.json");
    std::fs::write(&p, r#"{"out": "runs/a", "shots": 50}"#).unwrap();
    let c = ExperimentConfig::load(&p).unwrap();
    assert_eq!(c.out, dir.path().join("runs/a"));
    assert_eq!(c.shots, 50);
    std::fs::write(&p, r#"{"shots": 50, "bogus": 1}"#).unwrap();
    assert!(ExperimentConfig::load(&p).is_err());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_qv(&small(a.path())).unwrap();
    let rb = run_qv(&small(b.path())).unwrap();
    assert_eq!(ra.report, rb.report);
    for f in ["report.json", "results.json", "manifest.json", "trace.csv"] {
        assert_eq!(bytes(&a.path().join(f)), bytes(&b.path().join(f)), "{f}");
    }
    let m: RunManifest = read_json(&a.path().join("manifest.json")).unwrap();
    assert_eq!(m.config_hash, small(a.path()).hash());
    assert_eq!(m.circuit_seeds.len(), 6);
    assert_eq!(m.device_qubits, vec![16, 19, 22, 25, 24, 23]);
    let trace = String::from_utf8(bytes(&a.path().join("trace.csv"))).unwrap();
    // Header plus k = 2..=6.
    assert_eq!(trace.lines().count(), 6);
}

#[test]
fn staged_run_matches_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path();
    let cfg = small(&o.join("e2e"));
    run_qv(&cfg).unwrap();
    let s = o.join("staged");
    stage_gen(&cfg, &s.join("gen")).unwrap();
    let tr = stage_transpile(&cfg, &s.join("gen"), &s.join("transpile"), Some(&s.join("synth.csv"))).unwrap();
    stage_schedule(&cfg, &s.join("transpile"), &s.join("schedule"), Some(&s.join("timelines"))).unwrap();
    stage_simulate(&cfg, &s.join("schedule"), &s.join("results.json")).unwrap();
    stage_report(&s.join("results.json"), &s.join("report.json"), None).unwrap();
    assert_eq!(bytes(&s.join("report.json")), bytes(&o.join("e2e/report.json")));
    assert_eq!(bytes(&s.join("transpile/qv_0003.json")), bytes(&o.join("e2e/transpile/qv_0003.json")));
    // Re-running one stage from the previous directory reproduces it.
    stage_schedule(&cfg, &s.join("transpile"), &s.join("schedule2"), None).unwrap();
    assert_eq!(bytes(&s.join("schedule/qv_0002.json")), bytes(&s.join("schedule2/qv_0002.json")));
    let csv = String::from_utf8(bytes(&s.join("synth.csv"))).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 * 18);
    assert!(s.join("timelines/timeline_0000.csv").exists());
    assert_eq!(tr.circuits.len(), 6);
    assert!(s.join("transpile/routing.csv").exists());
}

#[test]
fn missing_stage_input_is_a_stage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let e = stage_transpile(&cfg, &dir.path().join("absent"), &dir.path().join("t"), None).unwrap_err();
    assert!(!matches!(e, QvfError::Config(_)), "{e:?}");
}

#[test]
fn zero_noise_hop_matches_ideal_mean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path()).with_overrides(&["noise_scale=0".into(), "shots=2000".into()]).unwrap();
    let r = run_qv(&cfg).unwrap();
    let gen = StageManifest::load(&dir.path().join("gen")).unwrap();
    for (h, e) in r.report.hops.iter().zip(&gen.circuits) {
        let se = (e.ideal_hop * (1.0 - e.ideal_hop) / 2000.0).sqrt();
        assert!((h.hop - e.ideal_hop).abs() < 5.0 * se, "{} vs {}", h.hop, e.ideal_hop);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: usize, sub: &str| {
        let cfg = small(&dir.path().join(sub));
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_qv(&cfg).unwrap());
        bytes(&dir.path().join(sub).join("report.json"))
    };
    assert_eq!(run(1, "one"), run(4, "four"));
}

#[test]
fn ab_experiments_on_a_small_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let dd = run_dd_ab(&cfg).unwrap();
    assert_eq!(dd.n, 6);
    assert_eq!(dd.pairs.len(), 6);
    let inc: f64 = dd.pairs.iter().map(|p| p.hop_dd - p.hop_idle).sum::<f64>() / 6.0;
    assert!((inc - dd.mean_increase).abs() < 1e-12);
    let ra = run_router_ab(&cfg).unwrap();
    assert_eq!(ra.rows.len(), 6);
    for r in &ra.rows {
        assert!(r.bip_log_cost >= r.heuristic_log_cost - 1e-9);
    }
    assert!(ra.ecr_duration_reduction > 0.0);
}
