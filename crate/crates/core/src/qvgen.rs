//! Quantum-volume model circuits.

use crate::error::{QvfError, Result};
use crate::linalg::{Mat4, C64};
use crate::model::{Circuit, Gate, ModelCircuit};
use crate::rng::{derive, substream, Rng};
use crate::simkit::{simulate_ideal, MAX_IDEAL_WIDTH};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QvSpec {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
}

impl QvSpec {
    pub fn new(m: usize, d: usize, seed: u64) -> Result<Self> {
        if m < 2 || d < 1 {
            return Err(QvfError::invariant("qv spec", format!("need m >= 2 and d >= 1, got m={m} d={d}")));
        }
        Ok(QvSpec { m, d, seed })
    }

    /// 2^min(m, d).
    pub fn volume(&self) -> u64 {
        1u64 << self.m.min(self.d)
    }
}

/// Haar-random two-qubit unitary with unit determinant.
pub fn haar_su4(rng: &mut Rng) -> Mat4 {
    let z = Mat4::from_fn(|_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..4 {
        let d = r[(j, j)];
        let ph = d / d.norm();
        for i in 0..4 {
            u[(i, j)] *= ph;
        }
    }
    let det = u.determinant();
    u / det.powf(0.25)
}

/// Seed of circuit `index` in a corpus rooted at `root`.
pub fn circuit_seed(root: u64, index: u64) -> u64 {
    derive(root, "gen", &[index])
}

pub fn generate_qv_circuit(spec: &QvSpec) -> ModelCircuit {
    let mut c = Circuit::new(spec.m);
    for layer in 0..spec.d {
        let mut rng = substream(spec.seed, "qv-layer", &[layer as u64]);
        let mut perm: Vec<usize> = (0..spec.m).collect();
        perm.shuffle(&mut rng);
        let gates = perm
            .chunks_exact(2)
            .map(|p| Gate::su4(haar_su4(&mut rng), p[0], p[1]))
            .collect();
        c.layers.push(gates);
    }
    c
}

/// `count` circuits of width `m` and depth `d` from one root seed.
pub fn qv_corpus(m: usize, d: usize, root: u64, count: usize) -> Vec<ModelCircuit> {
    (0..count as u64)
        .map(|i| generate_qv_circuit(&QvSpec { m, d, seed: circuit_seed(root, i) }))
        .collect()
}

/// Bitstring of basis index `i`; character k is qubit k.
pub fn bitstring(i: usize, m: usize) -> String {
    (0..m).map(|k| if (i >> (m - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn bitstring_index(s: &str) -> usize {
    s.bytes().fold(0, |acc, b| (acc << 1) | (b == b'1') as usize)
}

/// Indices whose probability is strictly above the median.
pub fn heavy_indices(probs: &[f64]) -> Vec<usize> {
    let mut sorted = probs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = if n % 2 == 0 { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 } else { sorted[n / 2] };
    (0..n).filter(|&i| probs[i] > median).collect()
}

/// Heavy outputs of the ideal distribution, as sorted bitstrings.
pub fn ideal_heavy_set(c: &ModelCircuit) -> Result<Vec<String>> {
    if c.width > MAX_IDEAL_WIDTH {
        return Err(QvfError::WidthBound { width: c.width, bound: MAX_IDEAL_WIDTH });
    }
    let p = simulate_ideal(c)?;
    Ok(heavy_indices(&p).into_iter().map(|i| bitstring(i, c.width)).collect())
}

/// Ideal probability mass on the heavy set.
pub fn ideal_hop(c: &ModelCircuit) -> Result<f64> {
    let p = simulate_ideal(c)?;
    Ok(heavy_indices(&p).iter().map(|&i| p[i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_error4;

    #[test]
    fn haar_is_special_unitary() {
        let mut rng = substream(3, "h", &[]);
        for _ in 0..100 {
            let u = haar_su4(&mut rng);
            assert!(unitarity_error4(&u) < 1e-12);
            assert!((u.determinant() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn shapes() {
        let c = generate_qv_circuit(&QvSpec::new(6, 6, 1).unwrap());
        assert_eq!(c.gate_count(), 18);
        let c = generate_qv_circuit(&QvSpec::new(3, 2, 1).unwrap());
        assert_eq!(c.gate_count(), 2);
        assert!(QvSpec::new(1, 1, 0).is_err());
        assert_eq!(bitstring(5, 4), "0101");
        assert_eq!(bitstring_index("0101"), 5);
    }

    #[test]
    fn median_ties_excluded() {
        assert_eq!(heavy_indices(&[0.25; 4]), Vec::<usize>::new());
        assert_eq!(heavy_indices(&[1.0, 0.0, 0.0, 0.0]), vec![0]);
    }
}
