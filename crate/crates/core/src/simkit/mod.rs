//! Statevector simulation, trajectory noise simulation and readout models.

mod density;
mod noise;
mod readout;
mod state;
mod trajectory;

pub use density::{density_distribution, MAX_DENSITY_WIDTH};
pub use noise::{
    depol_from_rb, tphi_us, BoundNoise, BoundQubit, EdgeNoise, NoiseModel, QubitNoise, ReadoutProfile,
    DEFAULT_QUASISTATIC_SIGMA,
};
pub use readout::{assignment_matrix, ground_state_error, total_assignment_error};
pub use state::StateVector;
pub use trajectory::{simulate_bound, simulate_noisy};

use crate::error::{QvfError, Result};
use crate::linalg::C64;
use crate::model::Circuit;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const MAX_IDEAL_WIDTH: usize = 14;
pub const MAX_UNITARY_WIDTH: usize = 10;

fn bound(width: usize, max: usize) -> Result<()> {
    if width > max {
        Err(QvfError::WidthBound { width, bound: max })
    } else {
        Ok(())
    }
}

/// Final state from |0…0⟩.
pub fn run_ideal(c: &Circuit) -> Result<StateVector> {
    bound(c.width, MAX_IDEAL_WIDTH)?;
    let mut s = StateVector::zero(c.width);
    for g in c.gates() {
        s.apply_gate(g);
    }
    Ok(s)
}

pub fn simulate_ideal(c: &Circuit) -> Result<Vec<f64>> {
    Ok(run_ideal(c)?.probabilities())
}

/// Full circuit unitary, column j = image of basis state j.
pub fn unitary_of(c: &Circuit) -> Result<DMatrix<C64>> {
    bound(c.width, MAX_UNITARY_WIDTH)?;
    let dim = 1usize << c.width;
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    for j in 0..dim {
        let mut s = StateVector::basis(c.width, j);
        for g in c.gates() {
            s.apply_gate(g);
        }
        for i in 0..dim {
            u[(i, j)] = s.amps[i];
        }
    }
    Ok(u)
}

/// Measured bitstring counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl ShotCounts {
    pub fn add(&mut self, bits: String) {
        *self.counts.entry(bits).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn merge(&mut self, other: &ShotCounts) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.shots += other.shots;
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        self.counts.get(bits).copied().unwrap_or(0) as f64 / self.shots as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, max_abs_d};
    use crate::model::Gate;

    #[test]
    fn empty_and_cx() {
        let u = unitary_of(&Circuit::new(3)).unwrap();
        assert!(max_abs_d(&(u - DMatrix::identity(8, 8))) < 1e-15);
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1)]);
        let u = unitary_of(&c).unwrap();
        let cx = linalg::cx();
        for i in 0..4 {
            for j in 0..4 {
                assert!((u[(i, j)] - cx[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_superposition() {
        let gates = (0..3).flat_map(|q| vec![Gate::phase(q, std::f64::consts::FRAC_PI_2), Gate::sx(q)]);
        let p = simulate_ideal(&Circuit::from_gates(3, gates)).unwrap();
        for x in p {
            assert!((x - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn width_bounds() {
        assert!(unitary_of(&Circuit::new(11)).is_err());
        assert!(simulate_ideal(&Circuit::new(15)).is_err());
    }
}
