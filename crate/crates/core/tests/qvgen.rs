mod common;

use common::oracle_probs;
use proptest::prelude::*;
use qvf::linalg::unitarity_error4;
use qvf::model::{Circuit, Gate, GateKind};
use qvf::qvgen::*;
use qvf::rng::substream;
use std::collections::BTreeSet;

#[test]
fn haar_samples_are_unitary_and_deterministic() {
    for seed in 0..50 {
        let u = haar_su4(&mut substream(seed, "t", &[]));
        assert!(unitarity_error4(&u) < 1e-12);
        let v = haar_su4(&mut substream(seed, "t", &[]));
        assert!(u.iter().zip(v.iter()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }
}

#[test]
fn haar_trace_moment() {
    // E|tr U|² = 1 over the unitary group; a global phase leaves it unchanged.
    let mut rng = substream(11, "moment", &[]);
    let n = 10_000;
    let xs: Vec<f64> = (0..n).map(|_| haar_su4(&mut rng).trace().norm_sqr()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - 1.0).abs() < 5.0 * se, "mean {mean} se {se}");
    // Entry moduli: E|U_ij|² = 1/4.
    let e: f64 = (0..n).map(|_| haar_su4(&mut rng)[(1, 2)].norm_sqr()).sum::<f64>() / n as f64;
    assert!((e - 0.25).abs() < 0.01, "{e}");
}

#[test]
fn layer_shapes() {
    let c = generate_qv_circuit(&QvSpec::new(6, 6, 4).unwrap());
    assert_eq!(c.layers.len(), 6);
    assert_eq!(c.gate_count(), 18);
    for layer in &c.layers {
        let qs: BTreeSet<usize> = layer.iter().flat_map(|g| g.qubits.clone()).collect();
        assert_eq!(qs.len(), 6);
    }
    let c = generate_qv_circuit(&QvSpec::new(3, 2, 4).unwrap());
    assert_eq!(c.gate_count(), 2);
    for layer in &c.layers {
        assert_eq!(layer.len(), 1);
    }
    assert_eq!(QvSpec::new(6, 6, 0).unwrap().volume(), 64);
    assert_eq!(QvSpec::new(5, 3, 0).unwrap().volume(), 8);
    assert!(QvSpec::new(2, 0, 0).is_err());
}

#[test]
fn generation_is_deterministic() {
    let s = QvSpec::new(6, 6, 99).unwrap();
    assert_eq!(generate_qv_circuit(&s).to_json(), generate_qv_circuit(&s).to_json());
    let other = QvSpec::new(6, 6, 100).unwrap();
    assert_ne!(generate_qv_circuit(&s).to_json(), generate_qv_circuit(&other).to_json());
    let a = qv_corpus(4, 4, 5, 3);
    assert_eq!(a[2].to_json(), generate_qv_circuit(&QvSpec::new(4, 4, circuit_seed(5, 2)).unwrap()).to_json());
}

fn oracle_heavy(p: &[f64], m: usize) -> Vec<String> {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    let med = (s[s.len() / 2 - 1] + s[s.len() / 2]) / 2.0;
    let mut out: Vec<String> = (0..p.len())
        .filter(|&i| p[i] > med)
        .map(|i| (0..m).map(|k| char::from(b'0' + ((i >> (m - 1 - k)) & 1) as u8)).collect())
        .collect();
    out.sort();
    out
}

#[test]
fn heavy_set_matches_state_vector_oracle() {
    for seed in 0..5 {
        let c = generate_qv_circuit(&QvSpec::new(6, 6, seed).unwrap());
        let p = oracle_probs(&c);
        let lib = ideal_heavy_set(&c).unwrap();
        assert_eq!(lib.len(), 32);
        assert_eq!(lib, oracle_heavy(&p, 6));
        let hop: f64 = lib.iter().map(|b| p[bitstring_index(b)]).sum();
        assert!((ideal_hop(&c).unwrap() - hop).abs() < 1e-12);
    }
}

#[test]
fn degenerate_distributions() {
    let id = Circuit::new(4);
    assert_eq!(ideal_heavy_set(&id).unwrap(), vec!["0000".to_string()]);
    let uniform = Circuit::from_gates(1, vec![Gate::new(GateKind::Sx, vec![0])]);
    assert!(ideal_heavy_set(&uniform).unwrap().is_empty());
    assert!(ideal_heavy_set(&Circuit::new(15)).is_err());
}

#[test]
fn ensemble_mean_ideal_hop() {
    let hs: Vec<f64> = qv_corpus(6, 6, 2024, 200)
        .iter()
        .map(|c| {
            let p = oracle_probs(c);
            let heavy = oracle_heavy(&p, 6);
            heavy.iter().map(|b| p[usize::from_str_radix(b, 2).unwrap()]).sum()
        })
        .collect();
    let mean = hs.iter().sum::<f64>() / hs.len() as f64;
    assert!((0.82..=0.88).contains(&mean), "{mean}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heavy_set_bounds(m in 2usize..7, d in 1usize..5, seed in any::<u64>()) {
        let c = generate_qv_circuit(&QvSpec::new(m, d, seed).unwrap());
        let h = ideal_heavy_set(&c).unwrap();
        prop_assert!(h.len() <= 1 << (m - 1));
        let p = oracle_probs(&c);
        let distinct: BTreeSet<u64> = p.iter().map(|x| x.to_bits()).collect();
        if distinct.len() == p.len() {
            prop_assert_eq!(h.len(), 1 << (m - 1));
        }
        prop_assert!(ideal_hop(&c).unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn heavy_indices_on_distinct_weights(w in prop::collection::btree_set(1u32..1_000_000, 1..20)) {
        let n = 2 * w.len();
        let mut p: Vec<f64> = w.iter().flat_map(|&x| [x as f64, x as f64 + 0.5]).collect();
        let tot: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= tot);
        let h = heavy_indices(&p);
        prop_assert_eq!(h.len(), n / 2);
        let hop: f64 = h.iter().map(|&i| p[i]).sum();
        prop_assert!(hop >= 0.5);
        let lightest_heavy = h.iter().map(|&i| p[i]).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(p.iter().filter(|&&x| x >= lightest_heavy).count(), n / 2);
    }
}
