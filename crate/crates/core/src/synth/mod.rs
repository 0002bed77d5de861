//! Two-qubit analysis and pulse-efficient synthesis.
//!
//! Synthesis dresses a fixed-shape template with outer one-qubit gates.
//! The three-entangler CX template keeps only two SX pulses between the
//! entanglers, so a generic SU(4) costs at most 2 + 4·2 = 10 pulses and the
//! outer eight can merge with neighbouring gates.

mod collapse;
mod euler;
mod fidelity;
mod weyl;

pub use collapse::collapse_1q_runs;
pub use euler::{product_1q, pulse_cost, synth_1q, wrap, zyz_angles};
pub use fidelity::{fidelity_table, FidelityTable};
pub use weyl::{kak, weyl_coordinates, KakDecomposition, WeylCoordinates};

use crate::linalg::{self, kron, Mat2, Mat4};
use crate::model::{Gate, GateKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    Cx,
    Ecr,
}

#[derive(Clone, Debug)]
pub struct Su4Decomposition {
    /// Native gates in time order on wires 0 and 1 of the target operator.
    pub gates: Vec<Gate>,
    pub entangler_count: usize,
    pub entangler: Entangler,
    /// Per entangler: true when its control is wire 0.
    pub direction_flags: Vec<bool>,
    pub predicted_fidelity: f64,
    pub sq_pulse_count: usize,
    pub outer_pulse_count: usize,
    pub coords: WeylCoordinates,
    pub table: FidelityTable,
}

impl Su4Decomposition {
    /// Operator implemented by `gates` on (wire0, wire1).
    pub fn matrix(&self) -> Mat4 {
        gates_matrix(&self.gates)
    }

    /// Gates with wire 0 → `q0`, wire 1 → `q1`.
    pub fn on(&self, q0: usize, q1: usize) -> Vec<Gate> {
        self.gates
            .iter()
            .map(|g| {
                let qs = g.qubits.iter().map(|&w| if w == 0 { q0 } else { q1 }).collect();
                Gate::new(g.kind.clone(), qs)
            })
            .collect()
    }

    pub fn interior_pulse_count(&self) -> usize {
        self.sq_pulse_count - self.outer_pulse_count
    }
}

/// Product of native gates on two wires, in time order.
pub fn gates_matrix(gates: &[Gate]) -> Mat4 {
    let mut m = Mat4::identity();
    for g in gates {
        let op = if let Some(u) = g.matrix1() {
            if g.qubits[0] == 0 {
                kron(&u, &linalg::id2())
            } else {
                kron(&linalg::id2(), &u)
            }
        } else if let Some(u) = g.matrix2() {
            if g.qubits[0] == 0 {
                u
            } else {
                linalg::reverse_qubits(&u)
            }
        } else {
            continue;
        };
        m = op * m;
    }
    m
}

fn count_pulses(gates: &[Gate]) -> (usize, usize) {
    let is_pulse = |g: &Gate| matches!(g.kind, GateKind::Sx | GateKind::Xp | GateKind::Xm);
    let total = gates.iter().filter(|g| is_pulse(g)).count();
    let first = gates.iter().position(|g| g.is_entangler());
    let last = gates.iter().rposition(|g| g.is_entangler());
    let outer = match (first, last) {
        (Some(f), Some(l)) => {
            gates[..f].iter().filter(|g| is_pulse(g)).count()
                + gates[l + 1..].iter().filter(|g| is_pulse(g)).count()
        }
        _ => total,
    };
    (total, outer)
}

fn on_wire(u: &Mat2, w: usize) -> Vec<Gate> {
    synth_1q(u, w)
}

fn entangler_gate(e: Entangler) -> Gate {
    match e {
        Entangler::Cx => Gate::cx(0, 1),
        Entangler::Ecr => Gate::ecr(0, 1),
    }
}

/// Template gates whose canonical coordinates are `w`, with `i` entanglers
/// controlled on wire 0.
fn template(i: usize, w: &WeylCoordinates, e: Entangler) -> Vec<Gate> {
    let (a, b, c) = (w.c1, w.c2, w.c3);
    let x = linalg::pauli_x();
    let ent = entangler_gate(e);
    match (i, e) {
        (0, _) => Vec::new(),
        (1, _) => vec![ent],
        (2, Entangler::Cx) => vec![
            ent.clone(),
            Gate::sx(0),
            Gate::phase(0, wrap(2.0 * a + PI)),
            Gate::sx(0),
            Gate::phase(1, wrap(2.0 * b)),
            ent,
        ],
        (3, Entangler::Cx) => vec![
            ent.clone(),
            Gate::sx(0),
            Gate::phase(1, wrap(2.0 * a)),
            ent.clone(),
            Gate::phase(0, wrap(2.0 * c + FRAC_PI_2)),
            Gate::sx(0),
            Gate::phase(1, wrap(2.0 * b)),
            ent,
        ],
        // ECR = ZX(π/4)·X_c and CX ≅ ZX(π/4) up to locals that commute with
        // it; the X_c pre-rotations fold into the interior one-qubit gates.
        (2, Entangler::Ecr) => {
            let inner = linalg::sx() * linalg::rz(2.0 * a + PI) * linalg::sx();
            let mut g = vec![ent.clone()];
            g.extend(on_wire(&(x * inner), 0));
            g.extend(on_wire(&linalg::rz(2.0 * b), 1));
            g.push(ent);
            g
        }
        (3, Entangler::Ecr) => {
            let n1c = x * linalg::rz(FRAC_PI_2) * linalg::sx();
            let n1t = linalg::rx(FRAC_PI_2) * linalg::rz(2.0 * a);
            let n2c = x * linalg::sx() * linalg::rz(2.0 * c + FRAC_PI_2);
            let n2t = linalg::rz(2.0 * b);
            let mut g = vec![ent.clone()];
            g.extend(on_wire(&n1c, 0));
            g.extend(on_wire(&n1t, 1));
            g.push(ent.clone());
            g.extend(on_wire(&n2c, 0));
            g.extend(on_wire(&n2t, 1));
            g.push(ent);
            g
        }
        _ => unreachable!("entangler count above 3"),
    }
}

fn target_coords(i: usize, w: &WeylCoordinates) -> WeylCoordinates {
    match i {
        0 => WeylCoordinates::new(0.0, 0.0, 0.0),
        1 => WeylCoordinates::new(FRAC_PI_4, 0.0, 0.0),
        2 => WeylCoordinates::new(w.c1, w.c2, 0.0),
        _ => *w,
    }
}

/// Optimal `i`-entangler approximation of `u`, entanglers controlled on
/// wire 0. Returns gates and the approximated operator.
fn synth_count(k: &KakDecomposition, i: usize, e: Entangler) -> (Vec<Gate>, Mat4) {
    let tc = target_coords(i, &k.coords);
    let approx = k.k1() * tc.canonical_gate() * k.k2() * k.phase;
    if i == 0 {
        let mut g = on_wire(&(k.k1l * k.k2l), 0);
        g.extend(on_wire(&(k.k1r * k.k2r), 1));
        return (g, approx);
    }
    let mut candidates = vec![tc];
    if tc.c3 != 0.0 {
        candidates.push(WeylCoordinates::new(tc.c1, tc.c2, -tc.c3));
    }
    let mut best: Option<(f64, Vec<Gate>)> = None;
    for cand in candidates {
        let core = template(i, &cand, e);
        let t = gates_matrix(&core);
        let kt = kak(&t).expect("template is unitary");
        // approx = k1·Ud·k2 ≈ (k1·kt1†)·t·(kt2†·k2) when coordinates agree.
        let pre_l = kt.k2l.adjoint() * k.k2l;
        let pre_r = kt.k2r.adjoint() * k.k2r;
        let post_l = k.k1l * kt.k1l.adjoint();
        let post_r = k.k1r * kt.k1r.adjoint();
        let mut g = on_wire(&pre_l, 0);
        g.extend(on_wire(&pre_r, 1));
        g.extend(core);
        g.extend(on_wire(&post_l, 0));
        g.extend(on_wire(&post_r, 1));
        let err = linalg::phase_distance4(&gates_matrix(&g), &approx);
        if err < 1e-9 {
            return (g, approx);
        }
        if best.as_ref().map_or(true, |(b, _)| err < *b) {
            best = Some((err, g));
        }
    }
    (best.unwrap().1, approx)
}

fn build(u: &Mat4, i: usize, e: Entangler, natural_first: bool) -> Su4Decomposition {
    let target = if natural_first { *u } else { linalg::reverse_qubits(u) };
    let k = kak(&target).expect("unitary input");
    let table = fidelity_table(&k.coords);
    let (mut gates, _approx) = synth_count(&k, i, e);
    if !natural_first {
        for g in gates.iter_mut() {
            for q in g.qubits.iter_mut() {
                *q = 1 - *q;
            }
        }
    }
    let (sq, outer) = count_pulses(&gates);
    let direction_flags = gates.iter().filter(|g| g.is_entangler()).map(|g| g.qubits[0] == 0).collect();
    Su4Decomposition {
        gates,
        entangler_count: i,
        entangler: e,
        direction_flags,
        predicted_fidelity: table.f_avg[i],
        sq_pulse_count: sq,
        outer_pulse_count: outer,
        coords: k.coords,
        table,
    }
}

/// Best approximation under basis fidelity `fb`: i* = argmax f_avg[i]·fb^i.
pub fn best_approximation(
    u: &Mat4,
    fb: f64,
    e: Entangler,
    natural_first: bool,
) -> (usize, Su4Decomposition) {
    let w = weyl_coordinates(u).expect("unitary input");
    let (i, _) = fidelity_table(&w).best(fb);
    (i, build(u, i, e, natural_first))
}

/// Exact synthesis with the fewest entanglers.
pub fn synthesize_pulse_efficient(u: &Mat4, e: Entangler, natural_first: bool) -> Su4Decomposition {
    best_approximation(u, 1.0, e, natural_first).1
}

/// Synthesis with a fixed entangler count (the optimal approximation for it).
pub fn synthesize_with_count(u: &Mat4, i: usize, e: Entangler, natural_first: bool) -> Su4Decomposition {
    build(u, i, e, natural_first)
}

/// Exact synthesis of SWAP·U.
pub fn synthesize_mirrored(u: &Mat4, e: Entangler, natural_first: bool) -> Su4Decomposition {
    synthesize_pulse_efficient(&(linalg::swap() * u), e, natural_first)
}

/// Best approximation of SWAP·U.
pub fn best_approximation_mirrored(
    u: &Mat4,
    fb: f64,
    e: Entangler,
    natural_first: bool,
) -> (usize, Su4Decomposition) {
    best_approximation(&(linalg::swap() * u), fb, e, natural_first)
}

/// F^best and the mirrored F̄^best for a gate, as used by the router cost.
pub fn best_fidelities(u: &Mat4, fb: f64) -> (f64, f64) {
    let d = fidelity_table(&weyl_coordinates(u).expect("unitary")).best(fb).1;
    let m = fidelity_table(&weyl_coordinates(&(linalg::swap() * u)).expect("unitary")).best(fb).1;
    (d, m)
}
