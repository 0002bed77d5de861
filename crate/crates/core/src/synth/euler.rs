//! One-qubit synthesis into Phase/SX with the fewest SX pulses.

use crate::linalg::{self, Mat2};
use crate::model::Gate;
use std::f64::consts::{FRAC_PI_2, PI};

const ANGLE_TOL: f64 = 1e-10;

/// Wrap into (-π, π].
pub fn wrap(t: f64) -> f64 {
    let mut x = t % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// ZYZ angles (θ, φ, λ) with U ≅ Rz(φ)·Ry(θ)·Rz(λ).
pub fn zyz_angles(u: &Mat2) -> (f64, f64, f64) {
    let det = u.determinant();
    let v = u / det.sqrt();
    let theta = 2.0 * v[(1, 0)].norm().atan2(v[(0, 0)].norm());
    let a11 = v[(1, 1)].arg();
    let a10 = v[(1, 0)].arg();
    let (sum, diff) = if v[(1, 0)].norm() < 1e-14 {
        (2.0 * a11, 0.0)
    } else if v[(1, 1)].norm() < 1e-14 {
        (0.0, 2.0 * a10)
    } else {
        (2.0 * a11, 2.0 * a10)
    };
    // sum = φ+λ, diff = φ−λ
    let phi = (sum + diff) / 2.0;
    let lam = (sum - diff) / 2.0;
    (theta, phi, lam)
}

/// Native gates on qubit `q`, in time order, implementing `u` up to phase.
pub fn synth_1q(u: &Mat2, q: usize) -> Vec<Gate> {
    let (theta, phi, lam) = zyz_angles(u);
    let mut out = Vec::with_capacity(5);
    let push_phase = |out: &mut Vec<Gate>, t: f64| {
        let t = wrap(t);
        if t.abs() > ANGLE_TOL {
            out.push(Gate::phase(q, t));
        }
    };
    if (theta / 2.0).sin().abs() < ANGLE_TOL {
        push_phase(&mut out, phi + lam);
    } else if (theta - FRAC_PI_2).abs() < ANGLE_TOL {
        // Ry(π/2) = Rz(π/2)·SX·Rz(−π/2)
        push_phase(&mut out, lam - FRAC_PI_2);
        out.push(Gate::sx(q));
        push_phase(&mut out, phi + FRAC_PI_2);
    } else {
        // Ry(θ) ≅ Rz(π)·SX·Rz(θ+π)·SX
        push_phase(&mut out, lam);
        out.push(Gate::sx(q));
        push_phase(&mut out, theta + PI);
        out.push(Gate::sx(q));
        push_phase(&mut out, phi + PI);
    }
    out
}

/// Minimal SX count needed for `u`.
pub fn pulse_cost(u: &Mat2) -> usize {
    let (theta, _, _) = zyz_angles(u);
    if (theta / 2.0).sin().abs() < ANGLE_TOL {
        0
    } else if (theta - FRAC_PI_2).abs() < ANGLE_TOL {
        1
    } else {
        2
    }
}

/// Product of one-qubit gates given in time order.
pub fn product_1q<'a>(gates: impl IntoIterator<Item = &'a Gate>) -> Mat2 {
    let mut m = linalg::id2();
    for g in gates {
        m = g.matrix1().expect("one-qubit gate") * m;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{phase_distance2, rx, ry, rz, sx};

    #[test]
    fn roundtrip_generic_and_special() {
        let cases = [
            rz(0.3) * ry(1.2) * rz(-2.0),
            ry(FRAC_PI_2),
            rz(0.4) * ry(FRAC_PI_2) * rz(1.0),
            rz(0.7),
            linalg::pauli_x(),
            linalg::pauli_y(),
            rx(0.2),
            sx(),
            linalg::id2(),
            ry(PI) * rz(0.5),
        ];
        for u in cases.iter() {
            let gs = synth_1q(u, 0);
            let m = product_1q(&gs);
            assert!(phase_distance2(u, &m) < 1e-12);
            let n = gs.iter().filter(|g| g.name() == "sx").count();
            assert_eq!(n, pulse_cost(u));
        }
        assert_eq!(pulse_cost(&sx()), 1);
        assert_eq!(pulse_cost(&linalg::pauli_x()), 2);
        assert_eq!(pulse_cost(&rz(1.0)), 0);
    }
}
