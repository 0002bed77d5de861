use super::euler::synth_1q;
use crate::linalg::{self, Mat2};
use crate::model::{Circuit, Gate, GateKind};

/// Merge maximal runs of SX/Phase on each wire and resynthesize them with
/// the fewest pulses. Runs are cut by multi-qubit gates, DD pulses,
/// measurements and barriers. Runs that reduce to the identity vanish.
/// A run already shaped like its resynthesis is kept verbatim, so the pass
/// is idempotent.
pub fn collapse_1q_runs(c: &Circuit) -> Circuit {
    let mut pending: Vec<Option<(Mat2, Vec<Gate>)>> = vec![None; c.width];
    let mut out = Vec::with_capacity(c.gate_count());
    let flush = |q: usize, pending: &mut Vec<Option<(Mat2, Vec<Gate>)>>, out: &mut Vec<Gate>| {
        if let Some((u, run)) = pending[q].take() {
            let new = synth_1q(&u, q);
            let shape = |v: &[Gate]| v.iter().map(|g| matches!(g.kind, GateKind::Sx)).collect::<Vec<_>>();
            if shape(&new) == shape(&run) {
                out.extend(run);
            } else {
                out.extend(new);
            }
        }
    };
    for g in c.gates() {
        match g.kind {
            GateKind::Sx | GateKind::Phase(_) => {
                let q = g.qubits[0];
                let m = g.matrix1().unwrap();
                let (u, mut run) = pending[q].take().unwrap_or_else(|| (linalg::id2(), Vec::new()));
                run.push(g.clone());
                pending[q] = Some((m * u, run));
            }
            _ => {
                for &q in &g.qubits {
                    flush(q, &mut pending, &mut out);
                }
                out.push(g.clone());
            }
        }
    }
    for q in 0..c.width {
        flush(q, &mut pending, &mut out);
    }
    Circuit::from_gates(c.width, out)
}
