use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use crate::error::{QvfError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    EcrCx,
    Ecr,
    DirectCx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateVariant {
    pub name: VariantName,
    pub duration_ns: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutQubitModel {
    pub p01: f64,
    pub p10: f64,
    pub reset_error: f64,
}

impl ReadoutQubitModel {
    pub fn perfect() -> Self {
        ReadoutQubitModel { p01: 0.0, p10: 0.0, reset_error: 0.0 }
    }

    /// Row = prepared bit, column = read bit.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p01], [self.p10, 1.0 - self.p10]]
    }

    /// Confusion matrix including the chance that the qubit did not start
    /// in the intended state (the preparation flips it).
    pub fn confusion_with_reset(&self) -> [[f64; 2]; 2] {
        let a = self.confusion();
        let r = self.reset_error;
        [
            [(1.0 - r) * a[0][0] + r * a[1][0], (1.0 - r) * a[0][1] + r * a[1][1]],
            [(1.0 - r) * a[1][0] + r * a[0][0], (1.0 - r) * a[1][1] + r * a[0][1]],
        ]
    }

    fn check(&self, field: &str) -> Result<()> {
        for (n, v) in [("p01", self.p01), ("p10", self.p10), ("reset_error", self.reset_error)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(QvfError::invariant(
                    format!("{}.{}", field, n),
                    format!("{} not in [0,1]", v),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    pub id: u32,
    pub t1_us: f64,
    pub t2_us: f64,
    pub sq_error: f64,
    pub sq_duration_ns: f64,
    pub readout: ReadoutQubitModel,
    /// Optional excited-state-promoted readout parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_esp: Option<ReadoutQubitModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub control: u32,
    pub target: u32,
    pub variants: Vec<GateVariant>,
}

impl EdgeSpec {
    pub fn variant(&self, name: VariantName) -> Option<&GateVariant> {
        self.variants.iter().find(|v| v.name == name)
    }

    /// Variant that realizes a CX: direct if calibrated, else the echoed one.
    pub fn cx_variant(&self) -> Option<&GateVariant> {
        self.variant(VariantName::DirectCx).or_else(|| self.variant(VariantName::EcrCx))
    }

    pub fn best_fidelity(&self) -> f64 {
        self.variants.iter().map(|v| 1.0 - v.error).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceFile {
    dt_ps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure_duration_ns: Option<f64>,
    qubits: Vec<QubitSpec>,
    edges: Vec<EdgeSpec>,
}

/// Coupling graph plus calibration data. Qubits are addressed by their
/// position in `qubits` (physical index); `id` is the hardware label.
#[derive(Clone, Debug)]
pub struct DeviceModel {
    pub dt_ps: u64,
    pub measure_duration_ns: Option<f64>,
    pub qubits: Vec<QubitSpec>,
    pub edges: Vec<EdgeSpec>,
    index: HashMap<u32, usize>,
    ends: Vec<(usize, usize)>,
    edge_of: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
}

impl PartialEq for DeviceModel {
    fn eq(&self, o: &Self) -> bool {
        self.dt_ps == o.dt_ps
            && self.measure_duration_ns == o.measure_duration_ns
            && self.qubits == o.qubits
            && self.edges == o.edges
    }
}

pub fn load_device(path: impl AsRef<Path>) -> Result<DeviceModel> {
    let p = path.as_ref();
    let s = std::fs::read_to_string(p)
        .map_err(|e| QvfError::Io { path: p.display().to_string(), source: e })?;
    DeviceModel::from_json(&s)
}

impl DeviceModel {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: DeviceFile = serde_json::from_str(s).map_err(|e| QvfError::Parse(e.to_string()))?;
        DeviceModel::build(f.dt_ps, f.measure_duration_ns, f.qubits, f.edges)
    }

    pub fn to_json(&self) -> String {
        let f = DeviceFile {
            dt_ps: self.dt_ps,
            measure_duration_ns: self.measure_duration_ns,
            qubits: self.qubits.clone(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&f).expect("device serializes")
    }

    pub fn build(
        dt_ps: u64,
        measure_duration_ns: Option<f64>,
        qubits: Vec<QubitSpec>,
        edges: Vec<EdgeSpec>,
    ) -> Result<Self> {
        if dt_ps == 0 {
            return Err(QvfError::invariant("dt_ps", "must be positive"));
        }
        if let Some(m) = measure_duration_ns {
            if !(m >= 0.0) {
                return Err(QvfError::invariant("measure_duration_ns", "must be nonnegative"));
            }
        }
        let mut index = HashMap::new();
        for (i, q) in qubits.iter().enumerate() {
            let f = format!("qubits[{}] (id {})", i, q.id);
            if index.insert(q.id, i).is_some() {
                return Err(QvfError::invariant(f, "duplicate id"));
            }
            if !(q.t1_us > 0.0) {
                return Err(QvfError::invariant(format!("{}.t1_us", f), "must be positive"));
            }
            if !(q.t2_us > 0.0) {
                return Err(QvfError::invariant(format!("{}.t2_us", f), "must be positive"));
            }
            if q.t2_us > 2.0 * q.t1_us {
                return Err(QvfError::invariant(
                    format!("{}.t2_us", f),
                    format!("T2 = {} exceeds 2·T1 = {}", q.t2_us, 2.0 * q.t1_us),
                ));
            }
            if !(q.sq_duration_ns > 0.0) {
                return Err(QvfError::invariant(format!("{}.sq_duration_ns", f), "must be positive"));
            }
            if !(0.0..=1.0).contains(&q.sq_error) {
                return Err(QvfError::invariant(format!("{}.sq_error", f), "not in [0,1]"));
            }
            q.readout.check(&format!("{}.readout", f))?;
            if let Some(r) = &q.readout_esp {
                r.check(&format!("{}.readout_esp", f))?;
            }
        }
        let mut ends = Vec::with_capacity(edges.len());
        let mut edge_of = HashMap::new();
        let mut adj = vec![Vec::new(); qubits.len()];
        for (k, e) in edges.iter().enumerate() {
            let f = format!("edges[{}] ({}->{})", k, e.control, e.target);
            let c = *index
                .get(&e.control)
                .ok_or_else(|| QvfError::invariant(format!("{}.control", f), "unknown qubit id"))?;
            let t = *index
                .get(&e.target)
                .ok_or_else(|| QvfError::invariant(format!("{}.target", f), "unknown qubit id"))?;
            if c == t {
                return Err(QvfError::invariant(f, "self loop"));
            }
            if edge_of.insert((c.min(t), c.max(t)), k).is_some() {
                return Err(QvfError::invariant(f, "edge listed twice (natural direction must be unique)"));
            }
            if e.variants.is_empty() {
                return Err(QvfError::invariant(format!("{}.variants", f), "no gate variant"));
            }
            for (vi, v) in e.variants.iter().enumerate() {
                if !(v.duration_ns > 0.0) {
                    return Err(QvfError::invariant(
                        format!("{}.variants[{}].duration_ns", f, vi),
                        "must be positive",
                    ));
                }
                if !(0.0..=1.0).contains(&v.error) {
                    return Err(QvfError::invariant(
                        format!("{}.variants[{}].error", f, vi),
                        "not in [0,1]",
                    ));
                }
                if e.variants[..vi].iter().any(|w| w.name == v.name) {
                    return Err(QvfError::invariant(
                        format!("{}.variants[{}].name", f, vi),
                        "duplicate variant",
                    ));
                }
            }
            ends.push((c, t));
            adj[c].push(t);
            adj[t].push(c);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        Ok(DeviceModel { dt_ps, measure_duration_ns, qubits, edges, index, ends, edge_of, adj })
    }

    /// Device with identical calibration on every qubit and edge, useful
    /// for synthetic topologies. Ids are 0..width; edges are (control, target).
    pub fn uniform(width: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let qubits = (0..width as u32)
            .map(|id| QubitSpec {
                id,
                t1_us: 100.0,
                t2_us: 100.0,
                sq_error: 3.5e-4,
                sq_duration_ns: 35.5,
                readout: ReadoutQubitModel::perfect(),
                readout_esp: None,
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(control, target)| EdgeSpec {
                control,
                target,
                variants: vec![
                    GateVariant { name: VariantName::DirectCx, duration_ns: 250.0, error: 7e-3 },
                    GateVariant { name: VariantName::Ecr, duration_ns: 290.0, error: 8e-3 },
                    GateVariant { name: VariantName::EcrCx, duration_ns: 320.0, error: 8.5e-3 },
                ],
            })
            .collect();
        DeviceModel::build(100, Some(5000.0), qubits, edges)
    }

    /// Uniform line 0 → 1 → … → width−1.
    pub fn line(width: usize) -> Result<Self> {
        let edges: Vec<(u32, u32)> = (1..width as u32).map(|i| (i - 1, i)).collect();
        DeviceModel::uniform(width, &edges)
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn id(&self, p: usize) -> u32 {
        self.qubits[p].id
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    /// Edges as (control, target) physical indices, in file order.
    pub fn edge_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_of.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&EdgeSpec> {
        self.edge_index(a, b).map(|k| &self.edges[k])
    }

    /// Whether the natural direction of edge {a,b} has `a` as control.
    pub fn natural_from(&self, a: usize, b: usize) -> Option<bool> {
        self.edge_index(a, b).map(|k| self.ends[k].0 == a)
    }

    /// All-pairs hop distances (usize::MAX when disconnected).
    pub fn distances(&self) -> Vec<Vec<usize>> {
        let n = self.width();
        let mut d = vec![vec![usize::MAX; n]; n];
        for s in 0..n {
            d[s][s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &self.adj[u] {
                    if d[s][v] == usize::MAX {
                        d[s][v] = d[s][u] + 1;
                        q.push_back(v);
                    }
                }
            }
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        self.width() == 0 || self.distances()[0].iter().all(|&x| x != usize::MAX)
    }

    /// Round a duration up to the scheduling grid.
    pub fn to_grid_ps(&self, ns: f64) -> u64 {
        let ps = (ns * 1000.0).round() as u64;
        ps.div_ceil(self.dt_ps) * self.dt_ps
    }

    pub fn measure_duration_ps(&self) -> u64 {
        self.to_grid_ps(self.measure_duration_ns.unwrap_or(0.0))
    }

    /// Variant used for `gate` (two-qubit native gates only).
    pub fn variant_for(&self, g: &Gate) -> Option<&GateVariant> {
        let e = self.edge(*g.qubits.first()?, *g.qubits.get(1)?)?;
        match g.kind {
            GateKind::Cx | GateKind::Swap => e.cx_variant(),
            GateKind::Ecr => e.variant(VariantName::Ecr),
            _ => None,
        }
    }

    /// Grid-rounded duration of a gate in picoseconds.
    pub fn duration_ps(&self, g: &Gate) -> Result<u64> {
        let unknown = || QvfError::UnknownDuration(format!("{} on {:?}", g.name(), g.qubits));
        let q0 = *g.qubits.first().ok_or_else(unknown)?;
        if q0 >= self.width() {
            return Err(unknown());
        }
        match g.kind {
            GateKind::Phase(_) | GateKind::Barrier => Ok(0),
            GateKind::Sx | GateKind::Xp | GateKind::Xm => Ok(self.to_grid_ps(self.qubits[q0].sq_duration_ns)),
            GateKind::Measure { .. } => Ok(self.measure_duration_ps()),
            GateKind::Cx | GateKind::Ecr => {
                let v = self.variant_for(g).ok_or_else(unknown)?;
                Ok(self.to_grid_ps(v.duration_ns))
            }
            GateKind::Swap => {
                let v = self.variant_for(g).ok_or_else(unknown)?;
                Ok(3 * self.to_grid_ps(v.duration_ns))
            }
            GateKind::Su4(_) => Err(unknown()),
        }
    }

    /// Restrict to the given qubit ids, in the given order.
    pub fn subdevice(&self, ids: &[u32]) -> Result<DeviceModel> {
        let mut qubits = Vec::with_capacity(ids.len());
        for &id in ids {
            let p = self
                .index_of(id)
                .ok_or_else(|| QvfError::invariant("subdevice", format!("unknown qubit id {}", id)))?;
            qubits.push(self.qubits[p].clone());
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| ids.contains(&e.control) && ids.contains(&e.target))
            .cloned()
            .collect();
        DeviceModel::build(self.dt_ps, self.measure_duration_ns, qubits, edges)
    }

    /// Copy of the device with one variant removed from every edge.
    pub fn without_variant(&self, name: VariantName) -> Result<DeviceModel> {
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                control: e.control,
                target: e.target,
                variants: e.variants.iter().filter(|v| v.name != name).cloned().collect(),
            })
            .collect();
        DeviceModel::build(self.dt_ps, self.measure_duration_ns, self.qubits.clone(), edges)
    }

    pub fn mean_sq_error(&self) -> f64 {
        self.qubits.iter().map(|q| q.sq_error).sum::<f64>() / self.width() as f64
    }

    /// Mean error of the CX-realizing variant over all edges.
    pub fn mean_cx_error(&self) -> f64 {
        let v: Vec<f64> = self.edges.iter().filter_map(|e| e.cx_variant()).map(|v| v.error).collect();
        v.iter().sum::<f64>() / v.len() as f64
    }

    pub fn mean_t1_us(&self) -> f64 {
        self.qubits.iter().map(|q| q.t1_us).sum::<f64>() / self.width() as f64
    }

    pub fn mean_t2_us(&self) -> f64 {
        self.qubits.iter().map(|q| q.t2_us).sum::<f64>() / self.width() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Arity,
    OutOfRange,
    NonAdjacent,
    DuplicateQubit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub layer: usize,
    pub index: usize,
    pub kind: ViolationKind,
    pub message: String,
}

/// One record per offending gate; empty when the circuit fits the device.
pub fn validate_physical_circuit(circuit: &Circuit, device: &DeviceModel) -> Vec<Violation> {
    let mut out = Vec::new();
    for (li, layer) in circuit.layers.iter().enumerate() {
        for (gi, g) in layer.iter().enumerate() {
            let mut push = |kind, message: String| {
                out.push(Violation { layer: li, index: gi, kind, message })
            };
            if let Some(a) = g.kind.arity() {
                if g.qubits.len() != a {
                    push(
                        ViolationKind::Arity,
                        format!("{} on {} qubits (expects {})", g.name(), g.qubits.len(), a),
                    );
                    continue;
                }
            }
            if let Some(&q) = g.qubits.iter().find(|&&q| q >= device.width()) {
                push(ViolationKind::OutOfRange, format!("{} uses qubit {} out of range", g.name(), q));
                continue;
            }
            if (1..g.qubits.len()).any(|i| g.qubits[..i].contains(&g.qubits[i])) {
                push(ViolationKind::DuplicateQubit, format!("{} repeats a qubit", g.name()));
                continue;
            }
            if g.qubits.len() == 2
                && !matches!(g.kind, GateKind::Barrier)
                && !device.is_adjacent(g.qubits[0], g.qubits[1])
            {
                push(
                    ViolationKind::NonAdjacent,
                    format!("non-adjacent gate {} on {:?}", g.name(), g.qubits),
                );
            }
        }
    }
    out
}

/// Simple path of `length` qubits maximizing the product of qubit and edge
/// fidelities; ties go to the lexicographically smallest id sequence.
pub fn select_chain(device: &DeviceModel, length: usize) -> Result<Vec<u32>> {
    let n = device.width();
    if length == 0 || length > n {
        return Err(QvfError::NoPath(length));
    }
    let qf: Vec<f64> = device.qubits.iter().map(|q| 1.0 - q.sq_error).collect();
    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut path = Vec::with_capacity(length);
    let mut on = vec![false; n];

    fn score(device: &DeviceModel, qf: &[f64], path: &[usize]) -> f64 {
        // Sorted factors make a path and its reverse score bit-identically.
        let mut f: Vec<f64> = path.iter().map(|&p| qf[p]).collect();
        for w in path.windows(2) {
            f.push(device.edge(w[0], w[1]).map(|e| e.best_fidelity()).unwrap_or(0.0));
        }
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        f.iter().product()
    }

    fn dfs(
        device: &DeviceModel,
        qf: &[f64],
        length: usize,
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        best: &mut Option<(f64, Vec<u32>)>,
    ) {
        if path.len() == length {
            let s = score(device, qf, path);
            let ids: Vec<u32> = path.iter().map(|&p| device.id(p)).collect();
            let better = match best {
                None => true,
                Some((bs, bids)) => s > *bs || (s == *bs && ids < *bids),
            };
            if better {
                *best = Some((s, ids));
            }
            return;
        }
        let last = *path.last().unwrap();
        for &v in device.neighbors(last) {
            if !on[v] {
                on[v] = true;
                path.push(v);
                dfs(device, qf, length, path, on, best);
                path.pop();
                on[v] = false;
            }
        }
    }

    for s in 0..n {
        on[s] = true;
        path.push(s);
        dfs(device, &qf, length, &mut path, &mut on, &mut best);
        path.pop();
        on[s] = false;
    }
    best.map(|(_, ids)| ids).ok_or(QvfError::NoPath(length))
}
