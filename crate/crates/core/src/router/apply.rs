use super::{LayoutSolution, RoutingConfig};
use crate::error::{QvfError, Result};
use crate::linalg::{self, Mat4, C64};
use crate::model::{Circuit, DeviceModel, Gate, GateKind, PhysicalCircuit};
use crate::synth::{best_approximation, collapse_1q_runs};
use nalgebra::DMatrix;

/// Two-qubit block on physical wires (p, q), matrix in that wire order.
struct Block {
    p: usize,
    q: usize,
    u: Mat4,
}

/// Lowers a routed model circuit to native gates on physical qubits.
///
/// Each SU(4) becomes SWAP·U when mirrored and swaps become SWAP blocks.
/// Consecutive blocks on the same pair with nothing else touching either
/// qubit in between are multiplied together, and every block is then
/// replaced by its best approximation under `cfg.fb` in the edge's natural
/// direction. Logical qubit q < width is measured into clbit q at its final
/// position, and adjacent single-qubit runs are merged at the end.
pub fn apply_layout(c: &Circuit, sol: &LayoutSolution, device: &DeviceModel, cfg: &RoutingConfig) -> Result<PhysicalCircuit> {
    super::validate_solution(c, device, sol)?;
    let n = device.width();
    let mut blocks: Vec<Block> = Vec::new();
    let mut last: Vec<Option<usize>> = vec![None; n];
    let mut push = |blocks: &mut Vec<Block>, p: usize, q: usize, u: Mat4| {
        if let (Some(a), Some(b)) = (last[p], last[q]) {
            if a == b {
                let k = &mut blocks[a];
                k.u = if (k.p, k.q) == (p, q) { u * k.u } else { linalg::reverse_qubits(&u) * k.u };
                return;
            }
        }
        blocks.push(Block { p, q, u });
        last[p] = Some(blocks.len() - 1);
        last[q] = Some(blocks.len() - 1);
    };
    for (t, layer) in c.layers.iter().enumerate() {
        for (j, g) in layer.iter().enumerate() {
            let GateKind::Su4(u) = &g.kind else {
                return Err(QvfError::invariant("routing input", format!("expected su4, found {}", g.name())));
            };
            let rg = sol.gates.iter().find(|r| r.layer == t && r.index == j).expect("validated");
            let (p, q) = rg.physical;
            let m = if rg.mirrored { linalg::swap() * **u } else { **u };
            push(&mut blocks, p, q, m);
        }
        let mut window: Vec<_> = sol.swaps.iter().filter(|s| s.window == t).collect();
        window.sort_by_key(|s| s.sublayer);
        for s in window {
            push(&mut blocks, s.edge.0, s.edge.1, linalg::swap());
        }
    }
    let mut out: Vec<Gate> = Vec::new();
    for b in &blocks {
        let natural = device.natural_from(b.p, b.q).expect("validated adjacency");
        let (_, d) = best_approximation(&b.u, cfg.fb, cfg.entangler, natural);
        out.extend(d.on(b.p, b.q));
    }
    for q in 0..c.width {
        out.push(Gate::measure(sol.final_mapping[q], q));
    }
    Ok(collapse_1q_runs(&Circuit::from_gates(n, out)))
}

/// Operator sending a logical basis state to the physical one under `pi`:
/// the bit of logical qubit q lands on physical qubit `pi[q]`.
pub fn permutation_operator(pi: &[usize]) -> DMatrix<C64> {
    let n = pi.len();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut y = 0;
        for (q, &p) in pi.iter().enumerate() {
            if (x >> (n - 1 - q)) & 1 == 1 {
                y |= 1 << (n - 1 - p);
            }
        }
        m[(y, x)] = linalg::ONE;
    }
    m
}
