use proptest::prelude::*;
use qvf::linalg::Mat4;
use qvf::model::*;
use qvf::QvfError;
use serde_json::Value;

const CHAIN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_chain.json");
const HEAVY_HEX: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_27.json");

fn raw(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn chain_file_is_a_six_qubit_line() {
    let d = load_device(CHAIN).unwrap();
    assert_eq!(d.width(), 6);
    let ids: Vec<u32> = (0..6).map(|p| d.id(p)).collect();
    assert_eq!(ids, vec![16, 19, 22, 25, 24, 23]);
    for p in 0..6 {
        let deg = d.neighbors(p).len();
        assert_eq!(deg, if p == 0 || p == 5 { 1 } else { 2 });
    }
    for p in 0..5 {
        assert!(d.is_adjacent(p, p + 1));
    }
}

#[test]
fn averages_recomputed_from_file() {
    for path in [CHAIN, HEAVY_HEX] {
        let v = raw(path);
        let d = load_device(path).unwrap();
        let qs = v["qubits"].as_array().unwrap();
        let mean = |k: &str| qs.iter().map(|q| q[k].as_f64().unwrap()).sum::<f64>() / qs.len() as f64;
        assert!((d.mean_sq_error() - mean("sq_error")).abs() < 1e-12);
        assert!((d.mean_t1_us() - mean("t1_us")).abs() < 1e-12);
        // CX error: direct when present, else the echoed one.
        let cx: Vec<f64> = v["edges"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| {
                let vs = e["variants"].as_array().unwrap();
                let pick = |n: &str| vs.iter().find(|x| x["name"] == n).map(|x| x["error"].as_f64().unwrap());
                pick("direct_cx").or_else(|| pick("ecr_cx")).unwrap()
            })
            .collect();
        assert!((d.mean_cx_error() - cx.iter().sum::<f64>() / cx.len() as f64).abs() < 1e-12);
    }
}

#[test]
fn chain_averages_match_published_line() {
    let d = load_device(CHAIN).unwrap();
    assert!((d.mean_sq_error() - 3.8e-4).abs() < 1e-12);
    assert!((d.mean_t1_us() - 113.0).abs() < 1e-9);
    assert!((d.mean_t2_us() - 122.0).abs() < 1e-9);
    assert!((d.mean_cx_error() - 6.4e-3).abs() < 5e-4, "{}", d.mean_cx_error());
}

fn with_qubit_field(key: &str, val: f64) -> String {
    let mut v = raw(CHAIN);
    v["qubits"][2][key] = Value::from(val);
    v.to_string()
}

#[test]
fn invariant_violations_name_the_field() {
    let t1 = raw(CHAIN)["qubits"][2]["t1_us"].as_f64().unwrap();
    match DeviceModel::from_json(&with_qubit_field("t2_us", 2.5 * t1)) {
        Err(QvfError::Invariant { field, .. }) => assert!(field.contains("t2_us"), "{field}"),
        r => panic!("{r:?}"),
    }
    match DeviceModel::from_json(&with_qubit_field("sq_error", 1.5)) {
        Err(QvfError::Invariant { field, .. }) => assert!(field.contains("sq_error")),
        r => panic!("{r:?}"),
    }
    let mut v = raw(CHAIN);
    v["edges"][1]["variants"] = Value::Array(vec![]);
    assert!(matches!(DeviceModel::from_json(&v.to_string()), Err(QvfError::Invariant { .. })));
    let mut v = raw(CHAIN);
    let e = v["edges"][0].clone();
    let mut rev = e.clone();
    rev["control"] = e["target"].clone();
    rev["target"] = e["control"].clone();
    v["edges"].as_array_mut().unwrap().push(rev);
    assert!(DeviceModel::from_json(&v.to_string()).is_err());
    assert!(matches!(DeviceModel::from_json("{\"dt_ps\": 100"), Err(QvfError::Parse(_))));
}

#[test]
fn device_round_trip_is_exact() {
    for p in [CHAIN, HEAVY_HEX] {
        let d = load_device(p).unwrap();
        let back = DeviceModel::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        for (a, b) in d.qubits.iter().zip(&back.qubits) {
            assert_eq!(a.t1_us.to_bits(), b.t1_us.to_bits());
            assert_eq!(a.readout.p10.to_bits(), b.readout.p10.to_bits());
        }
    }
}

#[test]
fn validation_examples() {
    let d = load_device(CHAIN).unwrap();
    let ok = Circuit::from_gates(6, vec![Gate::cx(0, 1)]);
    assert!(validate_physical_circuit(&ok, &d).is_empty());
    let far = Circuit::from_gates(6, vec![Gate::cx(0, 2)]);
    let v = validate_physical_circuit(&far, &d);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::NonAdjacent);
    let bad = Circuit { width: 6, layers: vec![vec![Gate::new(GateKind::Su4(Box::new(Mat4::identity())), vec![0, 1, 2])]] };
    let v = validate_physical_circuit(&bad, &d);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::Arity);
}

/// All simple paths with `len` nodes from the raw file, best by summed log
/// fidelity. A path and its reverse count once, as the smaller id list.
fn chain_oracle(path: &str, len: usize) -> Vec<(f64, Vec<u64>)> {
    let v = raw(path);
    let qf: std::collections::HashMap<u64, f64> = v["qubits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| (q["id"].as_u64().unwrap(), (1.0 - q["sq_error"].as_f64().unwrap()).ln()))
        .collect();
    let mut ef = std::collections::HashMap::new();
    for e in v["edges"].as_array().unwrap() {
        let best = e["variants"].as_array().unwrap().iter().map(|x| 1.0 - x["error"].as_f64().unwrap()).fold(0.0, f64::max);
        let (a, b) = (e["control"].as_u64().unwrap(), e["target"].as_u64().unwrap());
        ef.insert((a.min(b), a.max(b)), best.ln());
    }
    let mut frontier: Vec<Vec<u64>> = qf.keys().map(|&k| vec![k]).collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for p in &frontier {
            let last = *p.last().unwrap();
            for &(a, b) in ef.keys() {
                let other = if a == last { b } else if b == last { a } else { continue };
                if !p.contains(&other) {
                    let mut q = p.clone();
                    q.push(other);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    let mut scored: Vec<(f64, Vec<u64>)> = frontier
        .into_iter()
        .filter_map(|p| {
            let mut r = p.clone();
            r.reverse();
            if r < p {
                return None;
            }
            let s = p.iter().map(|q| qf[q]).sum::<f64>()
                + p.windows(2).map(|w| ef[&(w[0].min(w[1]), w[0].max(w[1]))]).sum::<f64>();
            Some((s, p))
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scored
}

#[test]
fn chain_selection_matches_exhaustive_search() {
    let d = load_device(HEAVY_HEX).unwrap();
    for len in [2, 4, 6] {
        let ranked = chain_oracle(HEAVY_HEX, len);
        assert!(ranked[0].0 - ranked[1].0 > 1e-9, "near tie at length {len}");
        let got: Vec<u64> = select_chain(&d, len).unwrap().into_iter().map(u64::from).collect();
        assert_eq!(got, ranked[0].1, "length {len}");
    }
    let six: Vec<u32> = select_chain(&d, 6).unwrap();
    assert_eq!(six, vec![16, 19, 22, 25, 24, 23]);
}

#[test]
fn chain_edge_cases() {
    let d = load_device(HEAVY_HEX).unwrap();
    let one = select_chain(&d, 1).unwrap();
    let best = d.qubits.iter().map(|q| q.sq_error).fold(f64::INFINITY, f64::min);
    let cands: Vec<u32> = d.qubits.iter().filter(|q| q.sq_error == best).map(|q| q.id).collect();
    assert_eq!(one, vec![*cands.iter().min().unwrap()]);
    assert!(matches!(select_chain(&d, 28), Err(QvfError::NoPath(28))));
    // A star has no simple path of 4 nodes.
    let star = DeviceModel::uniform(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    assert!(select_chain(&star, 4).is_err());
}

#[test]
fn circuit_json_round_trip() {
    let c = qvf::qvgen::generate_qv_circuit(&qvf::qvgen::QvSpec::new(6, 6, 3).unwrap());
    let back = Circuit::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    assert!(c.to_text().lines().next().unwrap().starts_with("SU4"));
    // Overlapping gates in one layer are rejected.
    let bad = r#"{"width":2,"layers":[[{"name":"cx","qubits":[0,1]},{"name":"sx","qubits":[0]}]]}"#;
    assert!(Circuit::from_json(bad).is_err());
}

#[test]
fn durations_resolve_for_native_gates() {
    let d = load_device(CHAIN).unwrap();
    let gates = vec![Gate::sx(0), Gate::phase(1, 0.5), Gate::xp(2), Gate::cx(1, 2), Gate::ecr(3, 4), Gate::swap(4, 5)];
    let c = Circuit::from_gates(6, gates.clone());
    assert!(validate_physical_circuit(&c, &d).is_empty());
    for g in &gates {
        assert!(d.duration_ps(g).is_ok(), "{}", g.name());
    }
    assert_eq!(d.duration_ps(&Gate::phase(0, 1.0)).unwrap(), 0);
    // Q22 → Q19 is the 199 ns direct CX.
    let (a, b) = (d.index_of(22).unwrap(), d.index_of(19).unwrap());
    assert_eq!(d.duration_ps(&Gate::cx(a, b)).unwrap(), 199_000);
}

fn arb_device() -> impl Strategy<Value = DeviceModel> {
    (2usize..7, any::<u64>()).prop_map(|(n, seed)| {
        use rand::Rng;
        let mut rng = qvf::rng::substream(seed, "device", &[]);
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (rng.gen_range(0..i), i)).collect();
        if n > 3 && rng.gen_bool(0.5) && !edges.contains(&(0, n as u32 - 1)) {
            edges.push((0, n as u32 - 1));
        }
        let mut d = DeviceModel::uniform(n, &edges).unwrap();
        for q in d.qubits.iter_mut() {
            q.sq_error = rng.gen_range(1e-4..1e-3);
            q.t1_us = rng.gen_range(50.0..150.0);
            q.t2_us = rng.gen_range(10.0..2.0 * q.t1_us);
        }
        DeviceModel::from_json(&d.to_json()).unwrap()
    })
}

proptest! {
    #[test]
    fn round_trip_on_random_devices(d in arb_device()) {
        prop_assert_eq!(DeviceModel::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn selected_chain_is_a_simple_path(d in arb_device(), len in 1usize..6) {
        if let Ok(ids) = select_chain(&d, len) {
            prop_assert_eq!(ids.len(), len);
            let ps: Vec<usize> = ids.iter().map(|&i| d.index_of(i).unwrap()).collect();
            for w in ps.windows(2) {
                prop_assert!(d.is_adjacent(w[0], w[1]));
            }
            let mut s = ps.clone();
            s.sort();
            s.dedup();
            prop_assert_eq!(s.len(), len);
        }
    }
}
