use super::noise::{BoundNoise, NoiseModel};
use super::state::StateVector;
use super::ShotCounts;
use crate::error::{QvfError, Result};
use crate::linalg::{self, Mat2, C64};
use crate::model::{DeviceModel, GateKind};
use crate::rng::{substream, Rng};
use crate::scheduler::Schedule;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

fn pauli(k: usize) -> Mat2 {
    match k {
        1 => linalg::pauli_x(),
        2 => linalg::pauli_y(),
        3 => linalg::pauli_z(),
        _ => linalg::id2(),
    }
}

/// Classical register: (physical qubit, clbit) pairs and register width.
/// Without measurements every qubit is read into the clbit of its index.
fn readout_map(s: &Schedule) -> (Vec<(usize, usize)>, usize, Option<u64>) {
    let mut map = Vec::new();
    let mut t = None;
    for e in &s.entries {
        if let GateKind::Measure { clbit } = e.gate.kind {
            map.push((e.gate.qubits[0], clbit));
            t = Some(t.map_or(e.start_ps, |x: u64| x.max(e.start_ps)));
        }
    }
    if map.is_empty() {
        map = (0..s.width).map(|q| (q, q)).collect();
    }
    let nbits = map.iter().map(|&(_, c)| c + 1).max().unwrap_or(0);
    (map, nbits, t)
}

struct Shot<'a> {
    noise: &'a BoundNoise,
    state: StateVector,
    last: Vec<u64>,
    delta: Vec<f64>,
    rng: Rng,
}

impl<'a> Shot<'a> {
    /// Relaxation over `dt` picoseconds, plus the static detuning phase when
    /// `idle` is set.
    fn evolve(&mut self, q: usize, dt: u64, idle: bool) {
        if dt == 0 {
            return;
        }
        let p = &self.noise.qubits[q];
        let dtf = dt as f64;
        if p.t1_ps.is_finite() {
            let gamma = 1.0 - (-dtf / p.t1_ps).exp();
            let p1 = self.state.prob_one(q);
            if self.rng.gen::<f64>() < gamma * p1 {
                // jump: |1⟩ → |0⟩
                let b = self.state.bit(q);
                for i in 0..self.state.amps.len() {
                    if i & b != 0 {
                        self.state.amps[i & !b] = self.state.amps[i];
                        self.state.amps[i] = linalg::ZERO;
                    }
                }
            } else {
                self.state.apply_phase(C64::new((1.0 - gamma).sqrt(), 0.0), q);
            }
            self.state.normalize();
        }
        if p.tphi_ps.is_finite() {
            let pz = 0.5 * (1.0 - (-dtf / p.tphi_ps).exp());
            if self.rng.gen::<f64>() < pz {
                self.state.apply_phase(C64::new(-1.0, 0.0), q);
            }
        }
        if idle && self.delta[q] != 0.0 {
            self.state.apply_phase(C64::from_polar(1.0, self.delta[q] * dtf), q);
        }
    }

    fn idle_until(&mut self, q: usize, t: u64) {
        if t > self.last[q] {
            let dt = t - self.last[q];
            self.evolve(q, dt, true);
            self.last[q] = t;
        }
    }

    fn kick1(&mut self, q: usize, p: f64) {
        if p > 0.0 && self.rng.gen::<f64>() < p {
            let k = self.rng.gen_range(1..4);
            self.state.apply_1q(&pauli(k), q);
        }
    }

    fn kick2(&mut self, a: usize, b: usize, p: f64) {
        if p > 0.0 && self.rng.gen::<f64>() < p {
            let k = self.rng.gen_range(1..16);
            if k / 4 != 0 {
                self.state.apply_1q(&pauli(k / 4), a);
            }
            if k % 4 != 0 {
                self.state.apply_1q(&pauli(k % 4), b);
            }
        }
    }
}

fn sample_index(probs: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn run_shot(s: &Schedule, noise: &BoundNoise, shot: u64, seed: u64, map: &[(usize, usize)], nbits: usize, t_meas: u64) -> String {
    let n = s.width;
    let mut rng = substream(seed, "sim-shot", &[shot]);
    let delta: Vec<f64> = (0..n)
        .map(|q| {
            let sigma = noise.qubits[q].sigma_per_ps;
            if sigma > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma * z
            } else {
                0.0
            }
        })
        .collect();
    let mut init = 0usize;
    for q in 0..n {
        let r = noise.qubits[q].readout.reset_error;
        if r > 0.0 && rng.gen::<f64>() < r {
            init |= 1 << (n - 1 - q);
        }
    }
    let mut sh = Shot { noise, state: StateVector::basis(n, init), last: vec![0; n], delta, rng };
    for e in &s.entries {
        match e.gate.kind {
            GateKind::Measure { .. } | GateKind::Barrier => continue,
            GateKind::Phase(_) => {
                // Diagonal, so it commutes with every idle channel.
                sh.state.apply_gate(&e.gate);
                continue;
            }
            _ => {}
        }
        for &q in &e.gate.qubits {
            sh.idle_until(q, e.start_ps);
        }
        sh.state.apply_gate(&e.gate);
        match e.gate.qubits.as_slice() {
            &[q] => {
                let p = noise.qubits[q].sq_depol;
                sh.kick1(q, p);
            }
            &[a, b] => {
                let p = noise.tq_depol[a][b];
                let p = if let GateKind::Swap = e.gate.kind { 1.0 - (1.0 - p).powi(3) } else { p };
                sh.kick2(a, b, p);
            }
            _ => {}
        }
        for &q in &e.gate.qubits {
            sh.evolve(q, e.duration_ps, false);
            sh.last[q] = e.end_ps();
        }
    }
    for &(q, _) in map {
        sh.idle_until(q, t_meas);
    }
    let u: f64 = sh.rng.gen();
    let idx = sample_index(sh.state.amps.iter().map(|a| a.norm_sqr()), u);
    read_bits(idx, n, map, nbits, noise, &mut sh.rng)
}

fn read_bits(idx: usize, n: usize, map: &[(usize, usize)], nbits: usize, noise: &BoundNoise, rng: &mut Rng) -> String {
    let mut bits = vec![b'0'; nbits];
    for &(q, c) in map {
        let v = (idx >> (n - 1 - q)) & 1 == 1;
        let ro = &noise.qubits[q].readout;
        let flip = if v { ro.p10 } else { ro.p01 };
        let read = if flip > 0.0 && rng.gen::<f64>() < flip { !v } else { v };
        bits[c] = if read { b'1' } else { b'0' };
    }
    String::from_utf8(bits).unwrap()
}

/// Monte-Carlo trajectories of a scheduled circuit.
///
/// Per shot: static detunings are drawn, reset errors flip the initial
/// state, and the schedule is replayed in time order. Each qubit
/// accumulates relaxation continuously and the static phase only while
/// idle; gates are followed by depolarizing kicks. Bits are then sampled
/// and passed through the readout confusion model.
pub fn simulate_noisy(s: &Schedule, device: &DeviceModel, noise: &NoiseModel, shots: u64, seed: u64) -> Result<ShotCounts> {
    let bound = noise.bind(device)?;
    simulate_bound(s, &bound, shots, seed)
}

pub fn simulate_bound(s: &Schedule, noise: &BoundNoise, shots: u64, seed: u64) -> Result<ShotCounts> {
    s.validate()?;
    if s.width > super::MAX_IDEAL_WIDTH {
        return Err(QvfError::WidthBound { width: s.width, bound: super::MAX_IDEAL_WIDTH });
    }
    if noise.qubits.len() < s.width {
        return Err(QvfError::Config("noise model narrower than schedule".into()));
    }
    let (map, nbits, t_meas) = readout_map(s);
    let t_meas = t_meas.unwrap_or(s.total_duration_ps);
    let any_reset = (0..s.width).any(|q| noise.qubits[q].readout.reset_error > 0.0);
    let fast = noise.evolution_is_ideal();
    let ideal = if fast { Some(super::run_ideal(&s.to_circuit())?.probabilities()) } else { None };
    let strings: Vec<String> = (0..shots)
        .into_par_iter()
        .map(|k| match &ideal {
            Some(p) if !any_reset => {
                let mut rng = substream(seed, "sim-shot", &[k]);
                let u: f64 = rng.gen();
                let idx = sample_index(p.iter().copied(), u);
                read_bits(idx, s.width, &map, nbits, noise, &mut rng)
            }
            _ => run_shot(s, noise, k, seed, &map, nbits, t_meas),
        })
        .collect();
    let mut counts = ShotCounts::default();
    for b in strings {
        counts.add(b);
    }
    Ok(counts)
}
