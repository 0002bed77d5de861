//! Explicit 0-1 model of layout and routing.
//!
//! Mapping blocks hold x[b][q][p] = 1 when logical q sits on physical p.
//! Each gate layer t has a block X_t before it and M_t after its mirrored
//! gates; the window after layer t runs h swap sub-layers S_{t,0..h}, the
//! last of which is X_{t+1}. Transitions A → B with swap indicators s_e on
//! edges e = (p, p') are linearized as
//!
//! ```text
//! x_B[q][p]  ≥ x_A[q][p]  − Σ_{e ∋ p} s_e
//! x_B[q][p'] ≥ x_A[q][p]  + s_e − 1
//! x_B[q][p]  ≥ x_A[q][p'] + s_e − 1
//! ```
//!
//! which, with both blocks bijective and the s_e forming a matching, pin B
//! to A composed with the swaps.

use super::{GateCosts, LayoutSolution, RoutingConfig};
use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    X { block: usize, q: usize, p: usize },
    G { layer: usize, gate: usize, mirrored: bool, edge: usize },
    Y { window: usize, sub: usize, edge: usize },
    W { window: usize, sub: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct BipModel {
    pub circuit: Circuit,
    pub device: DeviceModel,
    pub cfg: RoutingConfig,
    pub costs: GateCosts,
    pub n: usize,
    pub layers: usize,
    pub h: usize,
    pub vars: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
    /// Objective coefficients (maximize), log-fidelity units.
    pub objective: Vec<f64>,
    pub constant: f64,
    /// Block index of X_t, M_t, and S_{t,k}.
    x_block: Vec<usize>,
    m_block: Vec<usize>,
    s_block: Vec<Vec<usize>>,
    x_base: Vec<usize>,
    g_index: Vec<Vec<[Vec<Option<usize>>; 2]>>,
    y_index: Vec<Vec<Vec<usize>>>,
    w_index: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl BipModel {
    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    fn x(&self, block: usize, q: usize, p: usize) -> usize {
        self.x_base[block] + q * self.n + p
    }

    /// Objective value of an assignment.
    pub fn evaluate(&self, a: &[bool]) -> f64 {
        self.constant + a.iter().zip(&self.objective).filter(|(v, _)| **v).map(|(_, c)| c).sum::<f64>()
    }

    /// First violated constraint, if any.
    pub fn check(&self, a: &[bool]) -> Result<()> {
        if a.len() != self.vars.len() {
            return Err(QvfError::InvalidSolution("assignment length mismatch".into()));
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().filter(|(v, _)| a[*v]).map(|(_, k)| k).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + 1e-9,
                Sense::Ge => lhs >= c.rhs - 1e-9,
                Sense::Eq => (lhs - c.rhs).abs() <= 1e-9,
            };
            if !ok {
                return Err(QvfError::InvalidSolution(format!("violates {} ({} vs {})", c.label, lhs, c.rhs)));
            }
        }
        Ok(())
    }

    /// Assignment encoding a solution. Fails if the solution needs more
    /// swap sub-layers than the model has.
    pub fn encode(&self, sol: &LayoutSolution) -> Result<Vec<bool>> {
        let n = self.n;
        let c = &self.circuit;
        let mut a = vec![false; self.vars.len()];
        let set_block = |a: &mut Vec<bool>, b: usize, pi: &[usize]| {
            for (q, &p) in pi.iter().enumerate() {
                a[self.x(b, q, p)] = true;
            }
        };
        for t in 0..self.layers {
            let mut pi = sol.layer_mappings[t].clone();
            set_block(&mut a, self.x_block[t], &pi);
            for (j, g) in c.layers[t].iter().enumerate() {
                let rg = sol
                    .gates
                    .iter()
                    .find(|r| r.layer == t && r.index == j)
                    .ok_or_else(|| QvfError::InvalidSolution(format!("gate ({t},{j}) missing")))?;
                let e = self.edge_of(rg.physical.0, rg.physical.1).ok_or_else(|| {
                    QvfError::InvalidSolution(format!("gate ({t},{j}) not on an edge"))
                })?;
                let v = self.g_index[t][j][rg.mirrored as usize][e]
                    .ok_or_else(|| QvfError::InvalidSolution("mirrored branch not in model".into()))?;
                a[v] = true;
                if rg.mirrored {
                    pi.swap(g.qubits[0], g.qubits[1]);
                }
            }
            set_block(&mut a, self.m_block[t], &pi);
            if t + 1 < self.layers {
                for k in 0..self.h {
                    let ops: Vec<_> = sol.swaps.iter().filter(|s| s.window == t && s.sublayer == k).collect();
                    let mut inv = vec![0; n];
                    for (q, &p) in pi.iter().enumerate() {
                        inv[p] = q;
                    }
                    for s in &ops {
                        let e = self
                            .edge_of(s.edge.0, s.edge.1)
                            .ok_or_else(|| QvfError::InvalidSolution("swap not on an edge".into()))?;
                        a[self.y_index[t][k][e]] = true;
                        a[self.w_index[t][k]] = true;
                        inv.swap(s.edge.0, s.edge.1);
                    }
                    for (p, &q) in inv.iter().enumerate() {
                        pi[q] = p;
                    }
                    set_block(&mut a, self.s_block[t][k], &pi);
                }
                if sol.swaps.iter().any(|s| s.window == t && s.sublayer >= self.h) {
                    return Err(QvfError::InvalidSolution(format!("window {t} uses more than {} sub-layers", self.h)));
                }
            }
        }
        Ok(a)
    }

    fn edge_of(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.iter().position(|&(u, v)| (u, v) == (a, b) || (v, u) == (a, b))
    }
}

/// Builds the model for `c` on `device` with `h = cfg.h` swap sub-layers.
pub fn build_bip(c: &Circuit, device: &DeviceModel, cfg: &RoutingConfig) -> Result<BipModel> {
    super::check_inputs(c, device, cfg)?;
    let costs = GateCosts::new(c, cfg.fb)?;
    build_with(c, device, cfg, cfg.h, &costs)
}

pub(crate) fn build_with(
    c: &Circuit,
    device: &DeviceModel,
    cfg: &RoutingConfig,
    h: usize,
    costs: &GateCosts,
) -> Result<BipModel> {
    let n = device.width();
    let t_layers = c.layers.len();
    let edges: Vec<(usize, usize)> = device.edge_ends().to_vec();
    let dist = device.distances();

    let mut n_blocks = 0;
    let mut x_block = Vec::new();
    let mut m_block = Vec::new();
    let mut s_block: Vec<Vec<usize>> = Vec::new();
    for t in 0..t_layers {
        if t == 0 {
            x_block.push(n_blocks);
            n_blocks += 1;
        }
        m_block.push(n_blocks);
        n_blocks += 1;
        if t + 1 < t_layers {
            let mut s = Vec::new();
            if h == 0 {
                // X_{t+1} is M_t.
                x_block.push(m_block[t]);
            } else {
                for _ in 0..h {
                    s.push(n_blocks);
                    n_blocks += 1;
                }
                x_block.push(*s.last().unwrap());
            }
            s_block.push(s);
        }
    }

    let mut vars = Vec::new();
    let mut objective = Vec::new();
    let mut x_base = Vec::new();
    for b in 0..n_blocks {
        x_base.push(vars.len());
        for q in 0..n {
            for p in 0..n {
                vars.push(VarKind::X { block: b, q, p });
                objective.push(0.0);
            }
        }
    }
    let mut g_index = Vec::new();
    for t in 0..t_layers {
        let mut lt = Vec::new();
        for j in 0..c.layers[t].len() {
            let mut br: [Vec<Option<usize>>; 2] = [vec![None; edges.len()], vec![None; edges.len()]];
            for mirrored in [false, true] {
                if mirrored && !cfg.allow_mirroring {
                    continue;
                }
                for e in 0..edges.len() {
                    br[mirrored as usize][e] = Some(vars.len());
                    vars.push(VarKind::G { layer: t, gate: j, mirrored, edge: e });
                    objective.push(if mirrored { costs.mirrored[t][j] } else { costs.direct[t][j] });
                }
            }
            lt.push(br);
        }
        g_index.push(lt);
    }
    let mut y_index = Vec::new();
    let mut w_index = Vec::new();
    let swap_coef = 3.0 * cfg.fb.ln();
    for t in 0..t_layers.saturating_sub(1) {
        let mut yt = Vec::new();
        let mut wt = Vec::new();
        for k in 0..h {
            let mut yk = Vec::new();
            for e in 0..edges.len() {
                yk.push(vars.len());
                vars.push(VarKind::Y { window: t, sub: k, edge: e });
                objective.push(swap_coef);
            }
            yt.push(yk);
            wt.push(vars.len());
            vars.push(VarKind::W { window: t, sub: k });
            objective.push(cfg.k.ln());
        }
        y_index.push(yt);
        w_index.push(wt);
    }

    let mut model = BipModel {
        circuit: c.clone(),
        device: device.clone(),
        cfg: RoutingConfig { h, ..cfg.clone() },
        costs: costs.clone(),
        n,
        layers: t_layers,
        h,
        vars,
        constraints: Vec::new(),
        objective,
        constant: t_layers as f64 * cfg.k.ln(),
        x_block,
        m_block,
        s_block,
        x_base,
        g_index,
        y_index,
        w_index,
        edges: edges.clone(),
    };
    let mut cons = Vec::new();

    // Bijections.
    for b in 0..n_blocks {
        for q in 0..n {
            cons.push(Constraint {
                terms: (0..n).map(|p| (model.x(b, q, p), 1.0)).collect(),
                sense: Sense::Eq,
                rhs: 1.0,
                label: format!("row b{b} q{q}"),
            });
        }
        for p in 0..n {
            cons.push(Constraint {
                terms: (0..n).map(|q| (model.x(b, q, p), 1.0)).collect(),
                sense: Sense::Eq,
                rhs: 1.0,
                label: format!("col b{b} p{p}"),
            });
        }
    }

    let transition = |cons: &mut Vec<Constraint>, a: usize, b: usize, s: &[(usize, Vec<(usize, f64)>)], tag: &str| {
        // s: (edge, terms summing to s_e)
        for p in 0..n {
            let mut inc: Vec<(usize, f64)> = Vec::new();
            for (e, terms) in s {
                let (u, v) = edges[*e];
                if u == p || v == p {
                    inc.extend(terms.iter().cloned());
                }
            }
            if !inc.is_empty() {
                cons.push(Constraint { terms: inc.clone(), sense: Sense::Le, rhs: 1.0, label: format!("{tag} matching p{p}") });
            }
            for q in 0..n {
                let mut terms = vec![(model.x(b, q, p), 1.0), (model.x(a, q, p), -1.0)];
                terms.extend(inc.iter().cloned());
                cons.push(Constraint { terms, sense: Sense::Ge, rhs: 0.0, label: format!("{tag} stay q{q} p{p}") });
            }
        }
        for (e, st) in s {
            let (u, v) = edges[*e];
            for q in 0..n {
                for (from, to) in [(u, v), (v, u)] {
                    let mut terms = vec![(model.x(b, q, to), 1.0), (model.x(a, q, from), -1.0)];
                    terms.extend(st.iter().map(|&(i, k)| (i, -k)));
                    cons.push(Constraint { terms, sense: Sense::Ge, rhs: -1.0, label: format!("{tag} move q{q} e{e}") });
                }
            }
        }
    };

    for t in 0..t_layers {
        let xb = model.x_block[t];
        for (j, g) in c.layers[t].iter().enumerate() {
            let (q1, q2) = (g.qubits[0], g.qubits[1]);
            let mut all = Vec::new();
            for br in 0..2 {
                for e in 0..edges.len() {
                    if let Some(v) = model.g_index[t][j][br][e] {
                        all.push((v, 1.0));
                        let (u, w) = edges[e];
                        for q in [q1, q2] {
                            cons.push(Constraint {
                                terms: vec![(v, 1.0), (model.x(xb, q, u), -1.0), (model.x(xb, q, w), -1.0)],
                                sense: Sense::Le,
                                rhs: 0.0,
                                label: format!("adjacency L{t} g{j} e{e} q{q}"),
                            });
                        }
                    }
                }
            }
            cons.push(Constraint { terms: all, sense: Sense::Eq, rhs: 1.0, label: format!("route L{t} g{j}") });
        }
        // Mirror transition X_t → M_t.
        let mut s = Vec::new();
        for e in 0..edges.len() {
            let terms: Vec<(usize, f64)> = (0..c.layers[t].len())
                .filter_map(|j| model.g_index[t][j][1][e].map(|v| (v, 1.0)))
                .collect();
            if !terms.is_empty() {
                s.push((e, terms));
            }
        }
        transition(&mut cons, xb, model.m_block[t], &s, &format!("mirror L{t}"));
        if t + 1 < t_layers {
            let active: Vec<usize> = c.layers[t]
                .iter()
                .chain(c.layers[t + 1].iter())
                .flat_map(|g| g.qubits.iter().copied())
                .collect();
            let mut prev = model.m_block[t];
            if h == 0 {
                continue;
            }
            for k in 0..h {
                let cur = model.s_block[t][k];
                let s: Vec<(usize, Vec<(usize, f64)>)> =
                    (0..edges.len()).map(|e| (e, vec![(model.y_index[t][k][e], 1.0)])).collect();
                transition(&mut cons, prev, cur, &s, &format!("swap W{t}.{k}"));
                for e in 0..edges.len() {
                    let y = model.y_index[t][k][e];
                    cons.push(Constraint {
                        terms: vec![(model.w_index[t][k], 1.0), (y, -1.0)],
                        sense: Sense::Ge,
                        rhs: 0.0,
                        label: format!("used W{t}.{k} e{e}"),
                    });
                    if let Some(r) = cfg.swap_radius {
                        let (u, v) = edges[e];
                        let mut terms = vec![(y, 1.0)];
                        for &q in &active {
                            for p in 0..n {
                                if dist[p][u].min(dist[p][v]) <= r {
                                    terms.push((model.x(prev, q, p), -1.0));
                                }
                            }
                        }
                        cons.push(Constraint { terms, sense: Sense::Le, rhs: 0.0, label: format!("radius W{t}.{k} e{e}") });
                    }
                }
                prev = cur;
            }
        }
    }
    model.constraints = cons;
    Ok(model)
}
