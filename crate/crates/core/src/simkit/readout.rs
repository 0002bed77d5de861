use super::noise::{NoiseModel, ReadoutProfile};
use crate::error::{QvfError, Result};
use nalgebra::DMatrix;

/// Row = prepared m-bit state, column = assigned state; the tensor product
/// of per-qubit confusion matrices with reset error on the prepared side.
/// Uses the first `m` qubits of the noise model and its readout profile.
pub fn assignment_matrix(noise: &NoiseModel, m: usize) -> Result<DMatrix<f64>> {
    if m > super::MAX_UNITARY_WIDTH {
        return Err(QvfError::WidthBound { width: m, bound: super::MAX_UNITARY_WIDTH });
    }
    if noise.qubits.len() < m {
        return Err(QvfError::Config(format!("noise model has {} qubits, need {}", noise.qubits.len(), m)));
    }
    let mut a = DMatrix::<f64>::from_element(1, 1, 1.0);
    for q in &noise.qubits[..m] {
        let ro = match noise.profile {
            ReadoutProfile::Sp => q.readout,
            ReadoutProfile::Esp => q
                .readout_esp
                .ok_or_else(|| QvfError::Config(format!("qubit {} has no readout_esp", q.id)))?,
        };
        let c = ro.confusion_with_reset();
        let cm = DMatrix::from_fn(2, 2, |i, j| c[i][j]);
        a = a.kronecker(&cm);
    }
    Ok(a)
}

/// Mean over prepared states of the misassignment probability.
pub fn total_assignment_error(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (0..n).map(|i| 1.0 - a[(i, i)]).sum::<f64>() / n as f64
}

/// Misassignment probability of the all-zeros state.
pub fn ground_state_error(a: &DMatrix<f64>) -> f64 {
    1.0 - a[(0, 0)]
}
