//! Layout and routing of layered circuits onto a coupling graph.
//!
//! The objective is the modeled circuit fidelity
//!
//! ```text
//! log C = d·log K + Σ_direct log F_best + Σ_mirrored log F̄_best + |S|·3·log F_b
//! ```
//!
//! where `d` counts gate layers plus used swap sub-layers, F_best is the best
//! approximation fidelity of a gate (including its F_b^i entangler factor) and
//! F̄_best the same for SWAP·gate. [`route_bip`] optimizes it exactly;
//! [`route_heuristic`] is a lookahead swap-search baseline.

mod apply;
mod bip;
mod heuristic;
mod search;

pub use apply::{apply_layout, permutation_operator};
pub use bip::{build_bip, BipModel, Constraint, Sense, VarKind};
pub use heuristic::route_heuristic;
pub use search::{route_bip, solve_bip};

use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel, GateKind};
use crate::synth::{best_fidelities, Entangler};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Bip,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoutingConfig {
    /// Depth penalty per layer.
    pub k: f64,
    /// Basis gate fidelity.
    pub fb: f64,
    /// Swap sub-layers allowed between consecutive gate layers.
    pub h: usize,
    /// Raise `h` until the model becomes feasible, up to this value.
    pub h_max: usize,
    pub time_limit_s: f64,
    pub allow_mirroring: bool,
    /// Candidate swap edges must lie within this graph distance of a qubit
    /// used by the adjacent gate layers. `None` disables the restriction.
    pub swap_radius: Option<usize>,
    pub entangler: Entangler,
    /// Heuristic tie-breaking and initial layout seed.
    pub seed: u64,
    /// Heuristic lookahead weight and decay increment.
    pub lookahead_weight: f64,
    pub decay: f64,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        RoutingConfig {
            k: 0.995,
            fb: 0.99,
            h: 1,
            h_max: 4,
            time_limit_s: 10.0,
            allow_mirroring: true,
            swap_radius: Some(2),
            entangler: Entangler::Cx,
            seed: 0,
            lookahead_weight: 0.5,
            decay: 0.001,
        }
    }
}

impl RoutingConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(QvfError::invariant("routing.k", format!("{} not in (0,1]", self.k)));
        }
        if !(self.fb > 0.0 && self.fb <= 1.0) {
            return Err(QvfError::invariant("routing.fb", format!("{} not in (0,1]", self.fb)));
        }
        if self.h_max < self.h {
            return Err(QvfError::invariant("routing.h_max", "must be at least h"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutedGate {
    pub layer: usize,
    pub index: usize,
    pub logical: (usize, usize),
    pub physical: (usize, usize),
    pub mirrored: bool,
}

/// SWAP on physical edge `edge`, in sub-layer `sublayer` of the window
/// following gate layer `window`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapOp {
    pub window: usize,
    pub sublayer: usize,
    pub edge: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSolution {
    /// Physical qubit count (logical qubits are padded to this width).
    pub n: usize,
    /// Logical → physical before each gate layer.
    pub layer_mappings: Vec<Vec<usize>>,
    pub final_mapping: Vec<usize>,
    pub gates: Vec<RoutedGate>,
    pub swaps: Vec<SwapOp>,
    /// Gate layers plus used swap sub-layers.
    pub depth: usize,
    pub log_cost: f64,
    pub optimal: bool,
    pub method: Method,
    /// Swap sub-layers available per window when solved.
    pub h: usize,
    pub nodes: u64,
}

impl LayoutSolution {
    pub fn cost(&self) -> f64 {
        self.log_cost.exp()
    }

    pub fn swap_count(&self) -> usize {
        self.swaps.len()
    }

    pub fn mirrored(&self) -> impl Iterator<Item = &RoutedGate> {
        self.gates.iter().filter(|g| g.mirrored)
    }

    /// Largest number of sub-layers used in any window.
    pub fn max_sublayers(&self) -> usize {
        self.swaps.iter().map(|s| s.sublayer + 1).max().unwrap_or(0)
    }
}

/// Per-gate log fidelities (direct, mirrored), indexed [layer][gate].
#[derive(Clone, Debug)]
pub struct GateCosts {
    pub direct: Vec<Vec<f64>>,
    pub mirrored: Vec<Vec<f64>>,
    pub pairs: Vec<Vec<(usize, usize)>>,
}

impl GateCosts {
    pub fn new(c: &Circuit, fb: f64) -> Result<Self> {
        let mut direct = Vec::new();
        let mut mirrored = Vec::new();
        let mut pairs = Vec::new();
        for layer in &c.layers {
            let (mut d, mut m, mut p) = (Vec::new(), Vec::new(), Vec::new());
            for g in layer {
                let GateKind::Su4(u) = &g.kind else {
                    return Err(QvfError::invariant(
                        "routing input",
                        format!("expected su4 gates only, found {}", g.name()),
                    ));
                };
                let (fd, fm) = best_fidelities(u, fb);
                d.push(fd.ln());
                m.push(fm.ln());
                p.push((g.qubits[0], g.qubits[1]));
            }
            direct.push(d);
            mirrored.push(m);
            pairs.push(p);
        }
        Ok(GateCosts { direct, mirrored, pairs })
    }
}

/// Recomputes log C from a solution's components.
pub fn solution_log_cost(sol: &LayoutSolution, costs: &GateCosts, cfg: &RoutingConfig) -> f64 {
    let mut c = 0.0;
    for g in &sol.gates {
        c += if g.mirrored { costs.mirrored[g.layer][g.index] } else { costs.direct[g.layer][g.index] };
    }
    c += sol.swaps.len() as f64 * 3.0 * cfg.fb.ln();
    c += sol.depth as f64 * cfg.k.ln();
    c
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

/// Checks bijectivity, adjacency and the permutation bookkeeping linking
/// consecutive layer mappings through mirrors and swaps.
pub fn validate_solution(c: &Circuit, device: &DeviceModel, sol: &LayoutSolution) -> Result<()> {
    let n = device.width();
    let bad = |m: String| Err(QvfError::InvalidSolution(m));
    if sol.n != n || c.width > n {
        return bad(format!("width mismatch: solution {} device {} circuit {}", sol.n, n, c.width));
    }
    if sol.layer_mappings.len() != c.layers.len() {
        return bad("one mapping per layer required".into());
    }
    for m in sol.layer_mappings.iter().chain(std::iter::once(&sol.final_mapping)) {
        if !is_perm(m, n) {
            return bad(format!("mapping {:?} is not a bijection", m));
        }
    }
    let mut sublayers = 0;
    for (t, layer) in c.layers.iter().enumerate() {
        let mut pi = sol.layer_mappings[t].clone();
        for (j, g) in layer.iter().enumerate() {
            let rg = sol
                .gates
                .iter()
                .find(|r| r.layer == t && r.index == j)
                .ok_or_else(|| QvfError::InvalidSolution(format!("gate ({t},{j}) not routed")))?;
            let (a, b) = (g.qubits[0], g.qubits[1]);
            if rg.logical != (a, b) || rg.physical != (pi[a], pi[b]) {
                return bad(format!("gate ({t},{j}) placement inconsistent with mapping"));
            }
            if !device.is_adjacent(pi[a], pi[b]) {
                return bad(format!("gate ({t},{j}) on non-adjacent {:?}", rg.physical));
            }
        }
        for rg in sol.gates.iter().filter(|r| r.layer == t && r.mirrored) {
            let (a, b) = rg.logical;
            pi.swap(a, b);
        }
        let mut window: Vec<&SwapOp> = sol.swaps.iter().filter(|s| s.window == t).collect();
        if t + 1 == c.layers.len() && !window.is_empty() {
            return bad("swaps after the last layer".into());
        }
        window.sort_by_key(|s| s.sublayer);
        let used = window.iter().map(|s| s.sublayer + 1).max().unwrap_or(0);
        for k in 0..used {
            let ops: Vec<&&SwapOp> = window.iter().filter(|s| s.sublayer == k).collect();
            if ops.is_empty() {
                return bad(format!("empty sub-layer {k} in window {t}"));
            }
            let mut touched = vec![false; n];
            for s in &ops {
                let (u, v) = s.edge;
                if !device.is_adjacent(u, v) {
                    return bad(format!("swap on non-edge {:?}", s.edge));
                }
                if std::mem::replace(&mut touched[u], true) || std::mem::replace(&mut touched[v], true) {
                    return bad(format!("sub-layer {k} of window {t} is not a matching"));
                }
            }
            let mut inv = vec![0; n];
            for (q, &p) in pi.iter().enumerate() {
                inv[p] = q;
            }
            for s in &ops {
                let (u, v) = s.edge;
                inv.swap(u, v);
            }
            for (p, &q) in inv.iter().enumerate() {
                pi[q] = p;
            }
        }
        sublayers += used;
        let next = if t + 1 < c.layers.len() { &sol.layer_mappings[t + 1] } else { &sol.final_mapping };
        if &pi != next {
            return bad(format!("mapping after layer {t} does not match the next mapping"));
        }
    }
    if sol.depth != c.layers.len() + sublayers {
        return bad(format!("depth {} but {} layers and {} sub-layers", sol.depth, c.layers.len(), sublayers));
    }
    Ok(())
}

pub(crate) fn check_inputs(c: &Circuit, device: &DeviceModel, cfg: &RoutingConfig) -> Result<()> {
    cfg.check()?;
    if c.width > device.width() {
        return Err(QvfError::WidthBound { width: c.width, bound: device.width() });
    }
    if !device.is_connected() {
        return Err(QvfError::Infeasible("coupling graph is disconnected".into()));
    }
    for g in c.gates() {
        if g.qubits.len() != 2 {
            return Err(QvfError::invariant("routing input", format!("{} is not a two-qubit gate", g.name())));
        }
    }
    Ok(())
}
