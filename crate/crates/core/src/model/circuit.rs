use super::gate::{Gate, GateKind};
use crate::error::{QvfError, Result};
use crate::linalg::{Mat4, C64};
use serde::{Deserialize, Serialize};

/// Layered gate list. Gates inside one layer act on disjoint qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub width: usize,
    pub layers: Vec<Vec<Gate>>,
}

pub type ModelCircuit = Circuit;
pub type PhysicalCircuit = Circuit;

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, layers: Vec::new() }
    }

    /// Pack a program-ordered gate list into layers, each gate going to the
    /// first layer after the last one touching any of its qubits.
    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Self {
        let mut layers: Vec<Vec<Gate>> = Vec::new();
        let mut next = vec![0usize; width];
        for g in gates {
            let l = g.qubits.iter().map(|&q| next[q]).max().unwrap_or(0);
            if layers.len() <= l {
                layers.resize_with(l + 1, Vec::new);
            }
            for &q in &g.qubits {
                next[q] = l + 1;
            }
            layers[l].push(g);
        }
        Circuit { width, layers }
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn count(&self, f: impl Fn(&Gate) -> bool) -> usize {
        self.gates().filter(|g| f(g)).count()
    }

    pub fn entangler_count(&self) -> usize {
        self.count(|g| g.is_entangler())
    }

    pub fn sx_count(&self) -> usize {
        self.count(|g| matches!(g.kind, GateKind::Sx | GateKind::Xp | GateKind::Xm))
    }

    /// Checks gate structure, qubit range, and layer disjointness.
    pub fn check(&self) -> Result<()> {
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.width];
            for g in layer {
                g.check()?;
                for &q in &g.qubits {
                    if q >= self.width {
                        return Err(QvfError::invariant(
                            format!("layer {}", li),
                            format!("qubit {} out of range for width {}", q, self.width),
                        ));
                    }
                    if used[q] {
                        return Err(QvfError::invariant(
                            format!("layer {}", li),
                            format!("qubit {} used twice", q),
                        ));
                    }
                    used[q] = true;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let rec = CircuitRecord {
            width: self.width,
            layers: self
                .layers
                .iter()
                .map(|l| l.iter().map(GateRecord::from_gate).collect())
                .collect(),
        };
        serde_json::to_string(&rec).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: CircuitRecord =
            serde_json::from_str(s).map_err(|e| QvfError::Parse(e.to_string()))?;
        let mut layers = Vec::with_capacity(rec.layers.len());
        for l in rec.layers {
            let mut layer = Vec::with_capacity(l.len());
            for g in l {
                layer.push(g.into_gate()?);
            }
            layers.push(layer);
        }
        let c = Circuit { width: rec.width, layers };
        c.check()?;
        Ok(c)
    }

    /// One gate per line: `NAME q0 [q1] [θ]`. SU4 lines carry the 32 matrix
    /// reals after the qubits; measure lines carry the classical bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in self.gates() {
            out.push_str(&g.name().to_uppercase());
            for q in &g.qubits {
                out.push_str(&format!(" {}", q));
            }
            match &g.kind {
                GateKind::Phase(t) => out.push_str(&format!(" {:.17e}", t)),
                GateKind::Measure { clbit } => out.push_str(&format!(" {}", clbit)),
                GateKind::Su4(u) => {
                    for v in flatten(u) {
                        out.push_str(&format!(" {:.17e}", v));
                    }
                }
                _ => {}
            }
            out.push('\n');
        }
        out
    }
}

fn flatten(u: &Mat4) -> Vec<f64> {
    let mut v = Vec::with_capacity(32);
    for r in 0..4 {
        for c in 0..4 {
            v.push(u[(r, c)].re);
            v.push(u[(r, c)].im);
        }
    }
    v
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    width: usize,
    layers: Vec<Vec<GateRecord>>,
}

/// Serialized form of one gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateRecord {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
}

impl GateRecord {
    pub fn from_gate(g: &Gate) -> Self {
        let mut r = GateRecord {
            name: g.name().to_string(),
            qubits: g.qubits.clone(),
            theta: None,
            clbit: None,
            matrix: None,
        };
        match &g.kind {
            GateKind::Phase(t) => r.theta = Some(*t),
            GateKind::Measure { clbit } => r.clbit = Some(*clbit),
            GateKind::Su4(u) => r.matrix = Some(flatten(u)),
            _ => {}
        }
        r
    }

    pub fn into_gate(self) -> Result<Gate> {
        let missing = |f: &str| QvfError::Parse(format!("gate {} missing field `{}`", self.name, f));
        let kind = match self.name.as_str() {
            "su4" => {
                let m = self.matrix.as_ref().ok_or_else(|| missing("matrix"))?;
                if m.len() != 32 {
                    return Err(QvfError::Parse(format!(
                        "su4 matrix needs 32 reals, got {}",
                        m.len()
                    )));
                }
                let mut u = Mat4::zeros();
                for r in 0..4 {
                    for c in 0..4 {
                        let k = 2 * (4 * r + c);
                        u[(r, c)] = C64::new(m[k], m[k + 1]);
                    }
                }
                GateKind::Su4(Box::new(u))
            }
            "sx" => GateKind::Sx,
            "phase" => GateKind::Phase(self.theta.ok_or_else(|| missing("theta"))?),
            "xp" => GateKind::Xp,
            "xm" => GateKind::Xm,
            "cx" => GateKind::Cx,
            "ecr" => GateKind::Ecr,
            "swap" => GateKind::Swap,
            "measure" => GateKind::Measure { clbit: self.clbit.ok_or_else(|| missing("clbit"))? },
            "barrier" => GateKind::Barrier,
            other => return Err(QvfError::Parse(format!("unknown gate `{}`", other))),
        };
        Ok(Gate::new(kind, self.qubits))
    }
}
