//! Brute-force routing oracle and small instances.

use qvf::model::{Circuit, DeviceModel, Gate};
use qvf::qvgen::haar_su4;
use qvf::rng::substream;
use qvf::router::RoutingConfig;
use qvf::synth::best_fidelities;

/// Small devices with the largest layer each can host.
pub fn topologies() -> Vec<(DeviceModel, usize)> {
    vec![
        (DeviceModel::line(2).unwrap(), 1),
        (DeviceModel::line(3).unwrap(), 1),
        (DeviceModel::line(4).unwrap(), 2),
        (DeviceModel::uniform(4, &[(0, 1), (0, 2), (0, 3)]).unwrap(), 1),
        (DeviceModel::uniform(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(), 2),
        (DeviceModel::uniform(3, &[(0, 1), (1, 2), (2, 0)]).unwrap(), 1),
    ]
}

/// Random circuit of SU(4)s with `layers` layers on `width` logical qubits,
/// at most `max_gates` per layer.
pub fn random_circuit_capped(width: usize, layers: usize, max_gates: usize, seed: u64) -> Circuit {
    let mut rng = substream(seed, "router-test", &[]);
    let mut out = Vec::new();
    use rand::seq::SliceRandom;
    use rand::Rng;
    for _ in 0..layers {
        let mut qs: Vec<usize> = (0..width).collect();
        qs.shuffle(&mut rng);
        let pairs = rng.gen_range(1..=(width / 2).min(max_gates));
        let layer: Vec<Gate> = qs.chunks_exact(2).take(pairs).map(|p| Gate::su4(haar_su4(&mut rng), p[0], p[1])).collect();
        out.push(layer);
    }
    Circuit { width, layers: out }
}

pub fn random_circuit(width: usize, layers: usize, seed: u64) -> Circuit {
    random_circuit_capped(width, layers, width / 2, seed)
}

/// Brute force over initial layouts, mirror choices and up to `h` swap
/// matchings per window. Returns max log C, or None when infeasible.
pub fn exhaustive(c: &Circuit, device: &DeviceModel, cfg: &RoutingConfig, h: usize) -> Option<f64> {
    let n = device.width();
    let dist = device.distances();
    let ends = device.edge_ends().to_vec();
    let fid: Vec<Vec<(f64, f64)>> = c
        .layers
        .iter()
        .map(|l| {
            l.iter()
                .map(|g| {
                    let qvf::model::GateKind::Su4(u) = &g.kind else { unreachable!() };
                    let (d, m) = best_fidelities(u, cfg.fb);
                    (d.ln(), m.ln())
                })
                .collect()
        })
        .collect();

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    // All matchings (including the empty one) of a set of edges.
    fn all_matchings(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![vec![]];
        for &(u, v) in edges {
            let mut more = Vec::new();
            for m in &out {
                if m.iter().all(|&(a, b)| a != u && a != v && b != u && b != v) {
                    let mut m2 = m.clone();
                    m2.push((u, v));
                    more.push(m2);
                }
            }
            out.extend(more);
        }
        out
    }

    // Best completion from gate layer t with mapping pi.
    fn from_layer(
        t: usize,
        pi: &[usize],
        c: &Circuit,
        device: &DeviceModel,
        cfg: &RoutingConfig,
        h: usize,
        fid: &[Vec<(f64, f64)>],
        dist: &[Vec<usize>],
        ends: &[(usize, usize)],
    ) -> Option<f64> {
        let layer = &c.layers[t];
        if !layer.iter().all(|g| device.is_adjacent(pi[g.qubits[0]], pi[g.qubits[1]])) {
            return None;
        }
        let masks = if cfg.allow_mirroring { 1 << layer.len() } else { 1 };
        let mut best: Option<f64> = None;
        for mask in 0..masks {
            let mut v = cfg.k.ln();
            let mut p2 = pi.to_vec();
            for (j, g) in layer.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    v += fid[t][j].1;
                    p2.swap(g.qubits[0], g.qubits[1]);
                } else {
                    v += fid[t][j].0;
                }
            }
            let rest = if t + 1 == c.layers.len() {
                Some(0.0)
            } else {
                window(t, 0, &p2, c, device, cfg, h, fid, dist, ends)
            };
            if let Some(r) = rest {
                best = Some(best.map_or(v + r, |b: f64| b.max(v + r)));
            }
        }
        best
    }

    fn window(
        t: usize,
        k: usize,
        pi: &[usize],
        c: &Circuit,
        device: &DeviceModel,
        cfg: &RoutingConfig,
        h: usize,
        fid: &[Vec<(f64, f64)>],
        dist: &[Vec<usize>],
        ends: &[(usize, usize)],
    ) -> Option<f64> {
        let mut best = from_layer(t + 1, pi, c, device, cfg, h, fid, dist, ends);
        if k == h {
            return best;
        }
        let active: Vec<usize> =
            c.layers[t].iter().chain(&c.layers[t + 1]).flat_map(|g| g.qubits.iter().map(|&q| pi[q])).collect();
        let cand: Vec<(usize, usize)> = ends
            .iter()
            .copied()
            .filter(|&(u, v)| match cfg.swap_radius {
                None => true,
                Some(r) => active.iter().any(|&p| dist[p][u] <= r || dist[p][v] <= r),
            })
            .collect();
        for m in all_matchings(&cand).into_iter().filter(|m| !m.is_empty()) {
            let mut p2 = pi.to_vec();
            for &(u, v) in &m {
                for x in p2.iter_mut() {
                    if *x == u {
                        *x = v;
                    } else if *x == v {
                        *x = u;
                    }
                }
            }
            let cost = cfg.k.ln() + m.len() as f64 * 3.0 * cfg.fb.ln();
            if let Some(r) = window(t, k + 1, &p2, c, device, cfg, h, fid, dist, ends) {
                best = Some(best.map_or(cost + r, |b: f64| b.max(cost + r)));
            }
        }
        best
    }

    let mut best: Option<f64> = None;
    for pi in perms(n) {
        if let Some(v) = from_layer(0, &pi, c, device, cfg, h, &fid, &dist, &ends) {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}
