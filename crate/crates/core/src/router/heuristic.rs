//! Lookahead swap search, layer by layer.
//!
//! Before each gate layer, swaps are added greedily until every gate of the
//! layer is adjacent. A swap is scored by the mean distance of the layer's
//! pairs plus a weighted mean over the next layer, scaled by a per-qubit
//! decay that discourages moving the same qubits repeatedly. Initial layouts
//! are refined by routing forward and backward a few times. No gate is
//! mirrored.

use super::{check_inputs, solution_log_cost, GateCosts, LayoutSolution, Method, RoutedGate, RoutingConfig, SwapOp};
use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel};
use crate::rng::substream;
use rand::seq::SliceRandom;
use rand::Rng as _;

const REFINEMENT_PASSES: usize = 3;
/// Swap budget per layer, times width squared, before giving up.
const MAX_SWAPS_PER_QUBIT: usize = 4;

struct Router<'a> {
    device: &'a DeviceModel,
    dist: Vec<Vec<usize>>,
    cfg: &'a RoutingConfig,
}

impl Router<'_> {
    fn pair_cost(&self, pairs: &[(usize, usize)], pi: &[usize]) -> f64 {
        if pairs.is_empty() {
            return 0.0;
        }
        pairs.iter().map(|&(a, b)| self.dist[pi[a]][pi[b]] as f64 - 1.0).sum::<f64>() / pairs.len() as f64
    }

    /// Swaps (physical edges, in order) making every pair of `front`
    /// adjacent, applied to `pi` in place.
    fn route_layer(
        &self,
        front: &[(usize, usize)],
        next: &[(usize, usize)],
        pi: &mut [usize],
        rng: &mut crate::rng::Rng,
    ) -> Result<Vec<(usize, usize)>> {
        let n = pi.len();
        let mut inv = vec![0; n];
        for (q, &p) in pi.iter().enumerate() {
            inv[p] = q;
        }
        let mut decay = vec![1.0f64; n];
        let mut out = Vec::new();
        let mut since_progress = 0;
        let mut best_total = usize::MAX;
        loop {
            let open: Vec<(usize, usize)> =
                front.iter().copied().filter(|&(a, b)| !self.device.is_adjacent(pi[a], pi[b])).collect();
            if open.is_empty() {
                return Ok(out);
            }
            if out.len() > MAX_SWAPS_PER_QUBIT * n * n {
                return Err(QvfError::Infeasible(format!("layer of {} gates does not fit the coupling graph", front.len())));
            }
            let total: usize = open.iter().map(|&(a, b)| self.dist[pi[a]][pi[b]]).sum();
            if total < best_total {
                best_total = total;
                since_progress = 0;
            } else {
                since_progress += 1;
            }
            if since_progress > 2 * n {
                // Walk the first open pair together along a shortest path.
                let (a, b) = open[0];
                while self.dist[pi[a]][pi[b]] > 1 {
                    let pa = pi[a];
                    let step = *self.device.neighbors(pa).iter().find(|&&x| self.dist[x][pi[b]] + 1 == self.dist[pa][pi[b]]).unwrap();
                    self.apply(pa, step, pi, &mut inv);
                    out.push((pa, step));
                }
                best_total = usize::MAX;
                since_progress = 0;
                continue;
            }
            let mut cands: Vec<(usize, usize)> = Vec::new();
            for &(a, b) in &open {
                for p in [pi[a], pi[b]] {
                    for &x in self.device.neighbors(p) {
                        let e = (p.min(x), p.max(x));
                        if !cands.contains(&e) {
                            cands.push(e);
                        }
                    }
                }
            }
            cands.sort_unstable();
            let mut best = f64::INFINITY;
            let mut ties = Vec::new();
            for &(u, v) in &cands {
                let mut trial = pi.to_vec();
                trial[inv[u]] = v;
                trial[inv[v]] = u;
                let score = decay[u].max(decay[v])
                    * (self.pair_cost(front, &trial) + self.cfg.lookahead_weight * self.pair_cost(next, &trial));
                if score < best - 1e-12 {
                    best = score;
                    ties.clear();
                    ties.push((u, v));
                } else if (score - best).abs() <= 1e-12 {
                    ties.push((u, v));
                }
            }
            let (u, v) = ties[rng.gen_range(0..ties.len())];
            self.apply(u, v, pi, &mut inv);
            decay[u] += self.cfg.decay;
            decay[v] += self.cfg.decay;
            out.push((u, v));
        }
    }

    fn apply(&self, u: usize, v: usize, pi: &mut [usize], inv: &mut [usize]) {
        let (qu, qv) = (inv[u], inv[v]);
        pi[qu] = v;
        pi[qv] = u;
        inv.swap(u, v);
    }

    /// Mapping after routing all `layers` (in the given order) from `pi`.
    fn sweep(&self, layers: &[Vec<(usize, usize)>], pi: &mut [usize], rng: &mut crate::rng::Rng) -> Result<()> {
        for t in 0..layers.len() {
            let next = layers.get(t + 1).map(|v| v.as_slice()).unwrap_or(&[]);
            self.route_layer(&layers[t], next, pi, rng)?;
        }
        Ok(())
    }
}

/// Packs an ordered swap list into sub-layers: each swap goes one past the
/// latest earlier swap sharing a qubit.
fn pack(swaps: &[(usize, usize)], n: usize) -> Vec<usize> {
    let mut level = vec![0usize; n];
    swaps
        .iter()
        .map(|&(u, v)| {
            let k = level[u].max(level[v]);
            level[u] = k + 1;
            level[v] = k + 1;
            k
        })
        .collect()
}

/// Heuristic baseline router.
pub fn route_heuristic(c: &Circuit, device: &DeviceModel, cfg: &RoutingConfig) -> Result<LayoutSolution> {
    check_inputs(c, device, cfg)?;
    let costs = GateCosts::new(c, cfg.fb)?;
    let n = device.width();
    let r = Router { device, dist: device.distances(), cfg };
    let mut rng = substream(cfg.seed, "route-heuristic", &[]);
    let layers: Vec<Vec<(usize, usize)>> =
        c.layers.iter().map(|l| l.iter().map(|g| (g.qubits[0], g.qubits[1])).collect()).collect();
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut rng);
    let reversed: Vec<Vec<(usize, usize)>> = layers.iter().rev().cloned().collect();
    for _ in 0..REFINEMENT_PASSES {
        r.sweep(&layers, &mut pi, &mut rng)?;
        r.sweep(&reversed, &mut pi, &mut rng)?;
    }

    let mut layer_mappings = Vec::with_capacity(layers.len());
    let mut gates = Vec::new();
    let mut swaps = Vec::new();
    let mut depth = 0;
    for t in 0..layers.len() {
        let next = layers.get(t + 1).map(|v| v.as_slice()).unwrap_or(&[]);
        let ops = r.route_layer(&layers[t], next, &mut pi, &mut rng)?;
        if t == 0 {
            // Swaps ahead of the first layer just relabel the initial layout.
        } else {
            let levels = pack(&ops, n);
            for (&(u, v), &k) in ops.iter().zip(&levels) {
                swaps.push(SwapOp { window: t - 1, sublayer: k, edge: (u.min(v), u.max(v)) });
            }
            depth += levels.iter().map(|k| k + 1).max().unwrap_or(0);
        }
        layer_mappings.push(pi.clone());
        depth += 1;
        for (j, &(a, b)) in layers[t].iter().enumerate() {
            gates.push(RoutedGate { layer: t, index: j, logical: (a, b), physical: (pi[a], pi[b]), mirrored: false });
        }
    }
    // Swap edges are stored in the device's orientation.
    for s in swaps.iter_mut() {
        let (u, v) = s.edge;
        if device.natural_from(u, v) == Some(false) {
            s.edge = (v, u);
        }
    }
    let mut sol = LayoutSolution {
        n,
        layer_mappings,
        final_mapping: pi,
        gates,
        swaps,
        depth,
        log_cost: 0.0,
        optimal: false,
        method: Method::Heuristic,
        h: 0,
        nodes: 0,
    };
    sol.h = sol.max_sublayers();
    sol.log_cost = solution_log_cost(&sol, &costs, cfg);
    Ok(sol)
}
