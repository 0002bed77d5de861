use crate::linalg::{Mat2, Mat4, C64, ONE, ZERO};
use crate::model::Gate;

/// Pure state on `n` qubits. Qubit k is bit n−1−k of the basis index, so
/// the binary expansion of an index reads qubit 0 first.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        StateVector { n, amps }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        StateVector { n, amps }
    }

    #[inline]
    pub fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, u: &Mat2, q: usize) {
        let b = self.bit(q);
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | b];
                self.amps[i] = u00 * a0 + u01 * a1;
                self.amps[i | b] = u10 * a0 + u11 * a1;
            }
        }
    }

    /// diag(1, z) on qubit q.
    pub fn apply_phase(&mut self, z: C64, q: usize) {
        let b = self.bit(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & b != 0 {
                *a *= z;
            }
        }
    }

    /// `u` with local index 2·bit(q0) + bit(q1).
    pub fn apply_2q(&mut self, u: &Mat4, q0: usize, q1: usize) {
        let b0 = self.bit(q0);
        let b1 = self.bit(q1);
        for i in 0..self.amps.len() {
            if i & (b0 | b1) == 0 {
                let idx = [i, i | b1, i | b0, i | b0 | b1];
                let a = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
                for r in 0..4 {
                    self.amps[idx[r]] = u[(r, 0)] * a[0] + u[(r, 1)] * a[1] + u[(r, 2)] * a[2] + u[(r, 3)] * a[3];
                }
            }
        }
    }

    /// Applies a unitary gate; measurements and barriers are no-ops.
    pub fn apply_gate(&mut self, g: &Gate) {
        if let crate::model::GateKind::Phase(t) = g.kind {
            self.apply_phase(C64::from_polar(1.0, t), g.qubits[0]);
        } else if let Some(u) = g.matrix1() {
            self.apply_1q(&u, g.qubits[0]);
        } else if let Some(u) = g.matrix2() {
            self.apply_2q(&u, g.qubits[0], g.qubits[1]);
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        for a in self.amps.iter_mut() {
            *a /= s;
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that qubit q reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let b = self.bit(q);
        self.amps.iter().enumerate().filter(|(i, _)| i & b != 0).map(|(_, a)| a.norm_sqr()).sum()
    }
}
