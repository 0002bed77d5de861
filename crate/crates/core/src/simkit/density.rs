//! Exact density-matrix evolution of a schedule, used as an oracle for the
//! trajectory sampler on a few qubits. Static detuning is not supported.

use super::noise::BoundNoise;
use crate::error::{QvfError, Result};
use crate::linalg::{self, Mat2, C64};
use crate::model::GateKind;
use crate::scheduler::Schedule;
use nalgebra::DMatrix;

pub const MAX_DENSITY_WIDTH: usize = 3;

type DM = DMatrix<C64>;

fn embed1(u: &Mat2, q: usize, n: usize) -> DM {
    let mut m = DM::from_element(1, 1, linalg::ONE);
    for k in 0..n {
        let f = if k == q { DM::from_fn(2, 2, |i, j| u[(i, j)]) } else { DM::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

fn embed2(g: &crate::model::Gate, n: usize) -> DM {
    // Column images of basis states under the gate.
    let dim = 1 << n;
    let mut m = DM::zeros(dim, dim);
    for j in 0..dim {
        let mut s = super::StateVector::basis(n, j);
        s.apply_gate(g);
        for i in 0..dim {
            m[(i, j)] = s.amps[i];
        }
    }
    m
}

fn conj(rho: &DM, u: &DM) -> DM {
    u * rho * u.adjoint()
}

fn kraus(rho: &DM, ks: &[DM]) -> DM {
    let mut out = DM::zeros(rho.nrows(), rho.ncols());
    for k in ks {
        out += conj(rho, k);
    }
    out
}

fn relax(rho: &DM, noise: &BoundNoise, q: usize, n: usize, dt: u64) -> DM {
    if dt == 0 {
        return rho.clone();
    }
    let p = &noise.qubits[q];
    let mut r = rho.clone();
    if p.t1_ps.is_finite() {
        let g = 1.0 - (-(dt as f64) / p.t1_ps).exp();
        let mut k0 = Mat2::zeros();
        k0[(0, 0)] = linalg::ONE;
        k0[(1, 1)] = C64::new((1.0 - g).sqrt(), 0.0);
        let mut k1 = Mat2::zeros();
        k1[(0, 1)] = C64::new(g.sqrt(), 0.0);
        r = kraus(&r, &[embed1(&k0, q, n), embed1(&k1, q, n)]);
    }
    if p.tphi_ps.is_finite() {
        let pz = 0.5 * (1.0 - (-(dt as f64) / p.tphi_ps).exp());
        let z = embed1(&linalg::pauli_z(), q, n);
        r = &r * C64::new(1.0 - pz, 0.0) + conj(&r, &z) * C64::new(pz, 0.0);
    }
    r
}

fn depol(rho: &DM, qs: &[usize], n: usize, p: f64) -> DM {
    if p == 0.0 {
        return rho.clone();
    }
    let paulis = [linalg::id2(), linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let count = 4usize.pow(qs.len() as u32);
    let mut acc = DM::zeros(rho.nrows(), rho.ncols());
    for k in 1..count {
        let mut op = DM::identity(rho.nrows(), rho.ncols());
        let mut kk = k;
        for &q in qs.iter().rev() {
            op = embed1(&paulis[kk % 4], q, n) * op;
            kk /= 4;
        }
        acc += conj(rho, &op);
    }
    rho * C64::new(1.0 - p, 0.0) + acc * C64::new(p / (count - 1) as f64, 0.0)
}

/// Exact readout distribution over clbit strings (index = clbits read as
/// a big-endian integer, clbit 0 first).
pub fn density_distribution(s: &Schedule, noise: &BoundNoise) -> Result<Vec<f64>> {
    let n = s.width;
    if n > MAX_DENSITY_WIDTH {
        return Err(QvfError::WidthBound { width: n, bound: MAX_DENSITY_WIDTH });
    }
    if noise.qubits.iter().take(n).any(|q| q.sigma_per_ps != 0.0) {
        return Err(QvfError::Config("density oracle does not model static detuning".into()));
    }
    let dim = 1 << n;
    let mut rho = DM::zeros(dim, dim);
    for i in 0..dim {
        let mut p = 1.0;
        for q in 0..n {
            let r = noise.qubits[q].readout.reset_error;
            p *= if (i >> (n - 1 - q)) & 1 == 1 { r } else { 1.0 - r };
        }
        rho[(i, i)] = C64::new(p, 0.0);
    }
    let mut last = vec![0u64; n];
    let mut map = Vec::new();
    let mut t_meas = None;
    for e in &s.entries {
        match e.gate.kind {
            GateKind::Measure { clbit } => {
                map.push((e.gate.qubits[0], clbit));
                t_meas = Some(e.start_ps);
                continue;
            }
            GateKind::Barrier => continue,
            GateKind::Phase(_) => {
                rho = conj(&rho, &embed1(&e.gate.matrix1().unwrap(), e.gate.qubits[0], n));
                continue;
            }
            _ => {}
        }
        for &q in &e.gate.qubits {
            rho = relax(&rho, noise, q, n, e.start_ps - last[q]);
        }
        let u = if let Some(m) = e.gate.matrix1() { embed1(&m, e.gate.qubits[0], n) } else { embed2(&e.gate, n) };
        rho = conj(&rho, &u);
        let p = match e.gate.qubits.as_slice() {
            &[q] => noise.qubits[q].sq_depol,
            &[a, b] => {
                let p = noise.tq_depol[a][b];
                if let GateKind::Swap = e.gate.kind {
                    1.0 - (1.0 - p).powi(3)
                } else {
                    p
                }
            }
            _ => 0.0,
        };
        rho = depol(&rho, &e.gate.qubits, n, p);
        for &q in &e.gate.qubits {
            rho = relax(&rho, noise, q, n, e.duration_ps);
            last[q] = e.end_ps();
        }
    }
    if map.is_empty() {
        map = (0..n).map(|q| (q, q)).collect();
    }
    let t_meas = t_meas.unwrap_or(s.total_duration_ps);
    for &(q, _) in &map {
        if t_meas > last[q] {
            rho = relax(&rho, noise, q, n, t_meas - last[q]);
        }
    }
    let nbits = map.iter().map(|&(_, c)| c + 1).max().unwrap_or(0);
    let mut out = vec![0.0; 1 << nbits];
    for x in 0..dim {
        let px = rho[(x, x)].re;
        for y in 0..(1usize << nbits) {
            let mut p = px;
            for &(q, c) in &map {
                let v = (x >> (n - 1 - q)) & 1;
                let r = (y >> (nbits - 1 - c)) & 1;
                let conf = noise.qubits[q].readout.confusion();
                p *= conf[v][r];
            }
            // Unmeasured clbits always read 0.
            let measured: usize = map.iter().map(|&(_, c)| 1 << (nbits - 1 - c)).sum();
            if y & !measured != 0 {
                p = 0.0;
            }
            out[y] += p;
        }
    }
    Ok(out)
}
