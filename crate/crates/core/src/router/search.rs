//! Exact solver for the layout model.
//!
//! Best-first search over (stage, mapping) with edge costs −log of the
//! objective factors. The remaining-gate bound Σ min(−log F, −log F̄) plus
//! the remaining layer penalties is consistent, so the first goal popped is
//! optimal. The root enumerates every initial layout.

use super::bip::{build_with, BipModel};
use super::{
    check_inputs, route_heuristic, solution_log_cost, GateCosts, LayoutSolution, Method, RoutedGate,
    RoutingConfig, SwapOp,
};
use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

/// Widths above this skip exhaustive root enumeration and start from the
/// heuristic layout only.
const MAX_ENUMERATED_WIDTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Stage {
    /// Before gate layer t.
    Gate(usize),
    /// After gate layer t with k swap sub-layers used.
    Window(usize, usize),
}

#[derive(Clone, Debug)]
enum Action {
    Root,
    Layer(u32),
    Swaps(Vec<usize>),
    Advance,
}

struct Node {
    stage: Stage,
    pi: Vec<u8>,
    g: f64,
    parent: usize,
    action: Action,
}

struct Open {
    f: f64,
    seq: u64,
    node: usize,
}

impl PartialEq for Open {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Open {
    // Min-heap on (f, seq).
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f).then(o.seq.cmp(&self.seq))
    }
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !used[p] {
                used[p] = true;
                cur.push(p as u8);
                rec(n, cur, used, out);
                cur.pop();
                used[p] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// Non-empty matchings within `edges` (indices into `ends`).
fn matchings(ends: &[(usize, usize)], edges: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut busy = vec![false; n];
    fn rec(
        i: usize,
        ends: &[(usize, usize)],
        edges: &[usize],
        cur: &mut Vec<usize>,
        busy: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == edges.len() {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        rec(i + 1, ends, edges, cur, busy, out);
        let (u, v) = ends[edges[i]];
        if !busy[u] && !busy[v] {
            busy[u] = true;
            busy[v] = true;
            cur.push(edges[i]);
            rec(i + 1, ends, edges, cur, busy, out);
            cur.pop();
            busy[u] = false;
            busy[v] = false;
        }
    }
    rec(0, ends, edges, &mut cur, &mut busy, &mut out);
    out
}

struct Problem<'a> {
    c: &'a Circuit,
    cfg: &'a RoutingConfig,
    ends: Vec<(usize, usize)>,
    dist: Vec<Vec<usize>>,
    adjacent: Vec<Vec<bool>>,
    costs: GateCosts,
    /// Heuristic bound from the start of gate layer t.
    rest: Vec<f64>,
    h: usize,
    log_k: f64,
    swap_cost: f64,
    time_limit_s: f64,
}

impl Problem<'_> {
    fn bound(&self, s: Stage) -> f64 {
        match s {
            Stage::Gate(t) => self.rest[t],
            Stage::Window(t, _) => self.rest[t + 1],
        }
    }

    fn active(&self, t: usize) -> Vec<usize> {
        self.c.layers[t].iter().chain(self.c.layers[t + 1].iter()).flat_map(|g| g.qubits.iter().copied()).collect()
    }

    fn swap_candidates(&self, t: usize, pi: &[u8]) -> Vec<usize> {
        let Some(r) = self.cfg.swap_radius else {
            return (0..self.ends.len()).collect();
        };
        let phys: Vec<usize> = self.active(t).iter().map(|&q| pi[q] as usize).collect();
        (0..self.ends.len())
            .filter(|&e| {
                let (u, v) = self.ends[e];
                phys.iter().any(|&p| self.dist[p][u].min(self.dist[p][v]) <= r)
            })
            .collect()
    }
}

enum Outcome {
    Found(LayoutSolution),
    Infeasible(u64),
    Timeout,
}

fn search(p: &Problem, start: &Instant, roots: Vec<Vec<u8>>) -> Outcome {
    let c = p.c;
    let t_layers = c.layers.len();
    let n = p.ends.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1).max(c.width);
    let mut nodes: Vec<Node> = Vec::new();
    let mut open = BinaryHeap::new();
    let mut best_g: HashMap<(Stage, Vec<u8>), f64> = HashMap::new();
    let mut seq = 0u64;
    let mut push = |nodes: &mut Vec<Node>, open: &mut BinaryHeap<Open>, best_g: &mut HashMap<(Stage, Vec<u8>), f64>, node: Node| {
        let f = node.g + p.bound(node.stage);
        let key = (node.stage, node.pi.clone());
        if let Some(&g) = best_g.get(&key) {
            if g <= node.g + 1e-15 {
                return;
            }
        }
        best_g.insert(key, node.g);
        nodes.push(node);
        open.push(Open { f, seq, node: nodes.len() - 1 });
        seq += 1;
    };
    for pi in roots {
        push(&mut nodes, &mut open, &mut best_g, Node { stage: Stage::Gate(0), pi, g: 0.0, parent: usize::MAX, action: Action::Root });
    }
    let mut expanded = 0u64;
    while let Some(Open { node: id, .. }) = open.pop() {
        let (stage, pi, g) = (nodes[id].stage, nodes[id].pi.clone(), nodes[id].g);
        if best_g.get(&(stage, pi.clone())).is_some_and(|&b| b < g - 1e-15) {
            continue;
        }
        expanded += 1;
        if expanded % 1024 == 0 && start.elapsed().as_secs_f64() > p.time_limit_s {
            return Outcome::Timeout;
        }
        match stage {
            Stage::Gate(t) => {
                let layer = &c.layers[t];
                if !layer.iter().all(|gt| p.adjacent[pi[gt.qubits[0]] as usize][pi[gt.qubits[1]] as usize]) {
                    continue;
                }
                let masks = if p.cfg.allow_mirroring { 1u32 << layer.len() } else { 1 };
                for mask in 0..masks {
                    let mut cost = -p.log_k;
                    let mut next = pi.clone();
                    for (j, gt) in layer.iter().enumerate() {
                        if mask >> j & 1 == 1 {
                            cost -= p.costs.mirrored[t][j];
                            next.swap(gt.qubits[0], gt.qubits[1]);
                        } else {
                            cost -= p.costs.direct[t][j];
                        }
                    }
                    push(&mut nodes, &mut open, &mut best_g, Node {
                        stage: Stage::Window(t, 0),
                        pi: next,
                        g: g + cost,
                        parent: id,
                        action: Action::Layer(mask),
                    });
                }
            }
            Stage::Window(t, k) => {
                if t + 1 == t_layers {
                    return Outcome::Found(reconstruct(p, &nodes, id, n, expanded));
                }
                push(&mut nodes, &mut open, &mut best_g, Node {
                    stage: Stage::Gate(t + 1),
                    pi: pi.clone(),
                    g,
                    parent: id,
                    action: Action::Advance,
                });
                if k < p.h {
                    for m in matchings(&p.ends, &p.swap_candidates(t, &pi), n) {
                        let mut inv = vec![0u8; n];
                        for (q, &x) in pi.iter().enumerate() {
                            inv[x as usize] = q as u8;
                        }
                        for &e in &m {
                            let (u, v) = p.ends[e];
                            inv.swap(u, v);
                        }
                        let mut next = pi.clone();
                        for (x, &q) in inv.iter().enumerate() {
                            next[q as usize] = x as u8;
                        }
                        let cost = -p.log_k + m.len() as f64 * p.swap_cost;
                        push(&mut nodes, &mut open, &mut best_g, Node {
                            stage: Stage::Window(t, k + 1),
                            pi: next,
                            g: g + cost,
                            parent: id,
                            action: Action::Swaps(m),
                        });
                    }
                }
            }
        }
    }
    Outcome::Infeasible(expanded)
}

fn reconstruct(p: &Problem, nodes: &[Node], goal: usize, n: usize, expanded: u64) -> LayoutSolution {
    let mut chain = Vec::new();
    let mut id = goal;
    while id != usize::MAX {
        chain.push(id);
        id = nodes[id].parent;
    }
    chain.reverse();
    let t_layers = p.c.layers.len();
    let mut layer_mappings = vec![Vec::new(); t_layers];
    let mut gates = Vec::new();
    let mut swaps = Vec::new();
    let mut depth = 0;
    for w in chain.windows(2) {
        let (a, b) = (&nodes[w[0]], &nodes[w[1]]);
        match (&b.action, a.stage) {
            (Action::Layer(mask), Stage::Gate(t)) => {
                layer_mappings[t] = a.pi.iter().map(|&x| x as usize).collect();
                depth += 1;
                for (j, gt) in p.c.layers[t].iter().enumerate() {
                    let (q1, q2) = (gt.qubits[0], gt.qubits[1]);
                    gates.push(RoutedGate {
                        layer: t,
                        index: j,
                        logical: (q1, q2),
                        physical: (a.pi[q1] as usize, a.pi[q2] as usize),
                        mirrored: mask >> j & 1 == 1,
                    });
                }
            }
            (Action::Swaps(m), Stage::Window(t, k)) => {
                depth += 1;
                for &e in m {
                    swaps.push(SwapOp { window: t, sublayer: k, edge: p.ends[e] });
                }
            }
            _ => {}
        }
    }
    let final_mapping: Vec<usize> = nodes[goal].pi.iter().map(|&x| x as usize).collect();
    let mut sol = LayoutSolution {
        n,
        layer_mappings,
        final_mapping,
        gates,
        swaps,
        depth,
        log_cost: -nodes[goal].g,
        optimal: true,
        method: Method::Bip,
        h: p.h,
        nodes: expanded,
    };
    sol.log_cost = solution_log_cost(&sol, &p.costs, p.cfg);
    sol
}

fn empty_solution(n: usize, h: usize) -> LayoutSolution {
    LayoutSolution {
        n,
        layer_mappings: vec![],
        final_mapping: (0..n).collect(),
        gates: vec![],
        swaps: vec![],
        depth: 0,
        log_cost: 0.0,
        optimal: true,
        method: Method::Bip,
        h,
        nodes: 0,
    }
}

enum Solved {
    Optimal(LayoutSolution),
    Infeasible(u64),
    Timeout,
}

fn solve_model(model: &BipModel, time_limit_s: f64, start: &Instant) -> Result<Solved> {
    let c = &model.circuit;
    let cfg = &model.cfg;
    let n = model.n;
    if c.layers.is_empty() {
        return Ok(Solved::Optimal(empty_solution(n, model.h)));
    }
    let costs = &model.costs;
    let t_layers = c.layers.len();
    let mut rest = vec![0.0; t_layers + 1];
    for t in (0..t_layers).rev() {
        let gates: f64 = (0..c.layers[t].len())
            .map(|j| {
                let d = -costs.direct[t][j];
                if cfg.allow_mirroring {
                    d.min(-costs.mirrored[t][j])
                } else {
                    d
                }
            })
            .sum();
        rest[t] = rest[t + 1] + gates - cfg.k.ln();
    }
    let mut adjacent = vec![vec![false; n]; n];
    for &(u, v) in model.device.edge_ends() {
        adjacent[u][v] = true;
        adjacent[v][u] = true;
    }
    let roots = if n <= MAX_ENUMERATED_WIDTH {
        permutations(n)
    } else {
        let s = route_heuristic(c, &model.device, cfg)?;
        vec![s.layer_mappings[0].iter().map(|&x| x as u8).collect()]
    };
    let p = Problem {
        c,
        cfg,
        ends: model.device.edge_ends().to_vec(),
        dist: model.device.distances(),
        adjacent,
        costs: costs.clone(),
        rest,
        h: model.h,
        log_k: cfg.k.ln(),
        swap_cost: -3.0 * cfg.fb.ln(),
        time_limit_s,
    };
    Ok(match search(&p, start, roots) {
        Outcome::Found(mut sol) => {
            sol.optimal = n <= MAX_ENUMERATED_WIDTH;
            let a = model.encode(&sol)?;
            model.check(&a)?;
            let obj = model.evaluate(&a);
            if (obj - sol.log_cost).abs() > 1e-9 {
                return Err(QvfError::InvalidSolution(format!(
                    "model objective {} differs from route cost {}",
                    obj, sol.log_cost
                )));
            }
            Solved::Optimal(sol)
        }
        Outcome::Infeasible(k) => Solved::Infeasible(k),
        Outcome::Timeout => Solved::Timeout,
    })
}

fn timeout_fallback(model: &BipModel) -> Result<LayoutSolution> {
    let mut s = route_heuristic(&model.circuit, &model.device, &model.cfg)?;
    s.optimal = false;
    Ok(s)
}

/// Optimal solution of `model` within `time_limit_s`.
///
/// The returned assignment is checked against the model's constraints and
/// its objective against the recomputed route cost. On timeout the
/// heuristic route is returned with `optimal = false`.
pub fn solve_bip(model: &BipModel, time_limit_s: f64) -> Result<LayoutSolution> {
    match solve_model(model, time_limit_s, &Instant::now())? {
        Solved::Optimal(s) => Ok(s),
        Solved::Infeasible(_) => {
            Err(QvfError::Infeasible(format!("no route with at most {} swap sub-layers per window", model.h)))
        }
        Solved::Timeout => timeout_fallback(model),
    }
}

/// Builds and solves the model, raising `h` from `cfg.h` one step at a
/// time up to `cfg.h_max` while it is infeasible. The time limit covers all
/// attempts.
pub fn route_bip(c: &Circuit, device: &DeviceModel, cfg: &RoutingConfig) -> Result<LayoutSolution> {
    check_inputs(c, device, cfg)?;
    let costs = GateCosts::new(c, cfg.fb)?;
    let start = Instant::now();
    let mut explored = 0;
    for h in cfg.h..=cfg.h_max {
        let model = build_with(c, device, cfg, h, &costs)?;
        match solve_model(&model, cfg.time_limit_s, &start)? {
            Solved::Optimal(mut s) => {
                s.nodes += explored;
                return Ok(s);
            }
            Solved::Infeasible(k) => explored += k,
            Solved::Timeout => return timeout_fallback(&model),
        }
    }
    Err(QvfError::Infeasible(format!("no route with at most {} swap sub-layers per window", cfg.h_max)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matchings_of_a_path() {
        let ends = [(0, 1), (1, 2), (2, 3)];
        let m = matchings(&ends, &[0, 1, 2], 4);
        // {01}, {12}, {23}, {01,23}
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
    }
}
