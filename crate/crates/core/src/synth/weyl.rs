//! Canonical (KAK) decomposition of two-qubit unitaries.
//!
//! U = phase · (k1l⊗k1r) · exp(i(a XX + b YY + c ZZ)) · (k2l⊗k2r)
//! with π/4 ≥ a ≥ b ≥ |c|, and c ≥ 0 whenever a = π/4.

use crate::error::{QvfError, Result};
use crate::linalg::{self, c, cis, factor_kron, kron, Mat2, Mat4, C64};
use nalgebra::{Matrix4, SymmetricEigen};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

pub const CHAMBER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylCoordinates {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl WeylCoordinates {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        WeylCoordinates { c1, c2, c3 }
    }

    pub fn max_diff(&self, o: &WeylCoordinates) -> f64 {
        (self.c1 - o.c1).abs().max((self.c2 - o.c2).abs()).max((self.c3 - o.c3).abs())
    }

    pub fn in_chamber(&self, tol: f64) -> bool {
        let ok = FRAC_PI_4 + tol >= self.c1
            && self.c1 + tol >= self.c2
            && self.c2 + tol >= self.c3.abs();
        let sign_ok = self.c3 >= -tol || (FRAC_PI_4 - self.c1).abs() > tol;
        ok && sign_ok
    }

    pub fn canonical_gate(&self) -> Mat4 {
        linalg::canonical_gate(self.c1, self.c2, self.c3)
    }
}

#[derive(Clone, Debug)]
pub struct KakDecomposition {
    pub coords: WeylCoordinates,
    pub phase: C64,
    pub k1l: Mat2,
    pub k1r: Mat2,
    pub k2l: Mat2,
    pub k2r: Mat2,
}

impl KakDecomposition {
    pub fn k1(&self) -> Mat4 {
        kron(&self.k1l, &self.k1r)
    }
    pub fn k2(&self) -> Mat4 {
        kron(&self.k2l, &self.k2r)
    }
    pub fn reconstruct(&self) -> Mat4 {
        self.k1() * self.coords.canonical_gate() * self.k2() * self.phase
    }
}

fn magic() -> Mat4 {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let one = c(s, 0.0);
    let i = c(0.0, s);
    Mat4::new(one, z, z, i, z, i, one, z, z, i, -one, z, one, z, z, -i)
}

pub fn weyl_coordinates(u: &Mat4) -> Result<WeylCoordinates> {
    Ok(kak(u)?.coords)
}

/// Full decomposition; input must be unitary to 1e-10.
pub fn kak(u: &Mat4) -> Result<KakDecomposition> {
    let err = linalg::unitarity_error4(u);
    if err > 1e-10 {
        return Err(QvfError::NonUnitary(err));
    }
    let det = u.determinant();
    let g0 = cis(det.arg() / 4.0);
    let us = u * g0.conj();

    let b = magic();
    let bd = b.adjoint();
    let ub = bd * us * b;
    let m = ub.transpose() * ub;
    let p = diagonalize_symmetric_unitary(&m);

    let mut d = [C64::new(0.0, 0.0); 4];
    let pc = p.map(|x| c(x, 0.0));
    let diag = pc.transpose() * m * pc;
    for k in 0..4 {
        d[k] = diag[(k, k)];
    }
    let mut theta = [0.0f64; 4];
    for k in 0..4 {
        theta[k] = d[k].arg() / 2.0;
    }
    // det(ub) = 1 = det(O1)·Πe^{iθ}·det(P); det(P) = +1, so make Πe^{iθ} = 1.
    let s: f64 = theta.iter().sum();
    let n = (s / std::f64::consts::PI).round();
    if (n as i64).rem_euclid(2) == 1 {
        theta[0] += std::f64::consts::PI;
    }
    let s: f64 = theta.iter().sum();
    theta[3] -= s;

    let mut dinv = Mat4::zeros();
    for k in 0..4 {
        dinv[(k, k)] = cis(-theta[k]);
    }
    let o1 = ub * pc * dinv;
    let k1 = b * o1 * bd;
    let k2 = b * pc.transpose() * bd;

    let (l0, l1, l2, l3) = (theta[0], theta[1], theta[2], theta[3]);
    debug_assert!((l0 + l1 + l2 + l3).abs() < 1e-9);
    let a = (l0 + l1) / 2.0;
    let bb = (l1 + l3) / 2.0;
    let cc = (l0 + l3) / 2.0;
    let _ = l2;

    let mut st = Canon { x: [a, bb, cc], k1, k2, phase: g0 };
    st.canonicalize();

    let (k1l, k1r) = factor_kron(&st.k1);
    let (k2l, k2r) = factor_kron(&st.k2);
    let out = KakDecomposition {
        coords: WeylCoordinates::new(st.x[0], st.x[1], st.x[2]),
        phase: st.phase,
        k1l,
        k1r,
        k2l,
        k2r,
    };
    debug_assert!(
        linalg::max_abs(&(out.reconstruct() - u)) < 1e-8,
        "kak reconstruction failed"
    );
    Ok(out)
}

/// Real orthogonal P (det +1) with Pᵀ M P diagonal, for symmetric unitary M.
fn diagonalize_symmetric_unitary(m: &Mat4) -> Matrix4<f64> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    // Deterministic sequence of mixing weights; the first nearly always works.
    let weights = [
        (0.6180339887498949, 0.7861513777574233),
        (0.7548776662466927, 0.5698402909980532),
        (0.3141592653589793, 0.9510565162951535),
        (0.9238795325112867, -0.3826834323650898),
        (0.1234567, 0.8765432),
        (0.5, -0.8660254037844386),
    ];
    let mut best: Option<(f64, Matrix4<f64>)> = None;
    for &(r1, r2) in weights.iter() {
        let h = re * r1 + im * r2;
        let h = (h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut p = eig.eigenvectors;
        if p.determinant() < 0.0 {
            for r in 0..4 {
                p[(r, 0)] = -p[(r, 0)];
            }
        }
        let pc = p.map(|x| c(x, 0.0));
        let dm = pc.transpose() * m * pc;
        let mut off = 0.0f64;
        for r in 0..4 {
            for cc in 0..4 {
                if r != cc {
                    off = off.max(dm[(r, cc)].norm());
                }
            }
        }
        if off < 1e-12 {
            return p;
        }
        if best.as_ref().map_or(true, |(e, _)| off < *e) {
            best = Some((off, p));
        }
    }
    best.unwrap().1
}

struct Canon {
    x: [f64; 3],
    k1: Mat4,
    k2: Mat4,
    phase: C64,
}

fn pauli_pair(k: usize) -> Mat4 {
    let p = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    kron(&p[k], &p[k])
}

impl Canon {
    /// x[k] -= π/2, using exp(iπ/2 PP) = i·PP.
    fn shift_down(&mut self, k: usize) {
        self.x[k] -= FRAC_PI_2;
        self.k1 *= pauli_pair(k);
        self.phase *= c(0.0, 1.0);
    }

    fn shift_up(&mut self, k: usize) {
        self.x[k] += FRAC_PI_2;
        self.k1 *= pauli_pair(k);
        self.phase *= c(0.0, -1.0);
    }

    /// Negate the two coordinates other than `keep`, by conjugating with
    /// the Pauli on qubit 0 that commutes with the kept term.
    fn negate_pair(&mut self, keep: usize) {
        let p = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
        let m = kron(&p[keep], &linalg::id2());
        for k in 0..3 {
            if k != keep {
                self.x[k] = -self.x[k];
            }
        }
        self.k1 *= m;
        self.k2 = m * self.k2;
    }

    /// Exchange coordinates i and j via conjugation with W⊗W, W = (Pi+Pj)/√2.
    fn swap_coords(&mut self, i: usize, j: usize) {
        let p = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
        let w = (p[i] + p[j]) * c(FRAC_1_SQRT_2, 0.0);
        let ww = kron(&w, &w);
        self.x.swap(i, j);
        self.k1 *= ww;
        self.k2 = ww * self.k2;
    }

    fn canonicalize(&mut self) {
        // Reduce into (-π/4, π/4].
        for k in 0..3 {
            while self.x[k] > FRAC_PI_4 + 1e-13 {
                self.shift_down(k);
            }
            while self.x[k] <= -FRAC_PI_4 + 1e-13 {
                self.shift_up(k);
            }
        }
        // Sort by absolute value, descending.
        for _ in 0..3 {
            if self.x[0].abs() < self.x[1].abs() {
                self.swap_coords(0, 1);
            }
            if self.x[1].abs() < self.x[2].abs() {
                self.swap_coords(1, 2);
            }
        }
        // Signs: a, b ≥ 0.
        if self.x[0] < 0.0 && self.x[1] < 0.0 {
            self.negate_pair(2);
        } else if self.x[0] < 0.0 {
            self.negate_pair(1);
        } else if self.x[1] < 0.0 {
            self.negate_pair(0);
        }
        // On the a = π/4 face, (π/4, b, c) ~ (π/4, b, -c).
        if (self.x[0] - FRAC_PI_4).abs() < CHAMBER_TOL && self.x[2] < 0.0 {
            self.negate_pair(1);
            self.shift_up(0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cx, phase_distance4, rx, ry, rz, swap};
    use std::f64::consts::PI;

    fn local(seed: f64) -> Mat2 {
        rz(seed * 1.3) * ry(seed * 0.7 + 0.2) * rz(-seed * 2.1)
    }

    #[test]
    fn magic_basis_diagonalizes_canonical_gate() {
        let (a, b, cc) = (0.3, 0.2, -0.1);
        let bm = magic();
        let d = bm.adjoint() * linalg::canonical_gate(a, b, cc) * bm;
        let lam = [a - b + cc, a + b - cc, -a - b - cc, -a + b + cc];
        for r in 0..4 {
            for k in 0..4 {
                let expect = if r == k { cis(lam[r]) } else { c(0.0, 0.0) };
                assert!((d[(r, k)] - expect).norm() < 1e-14, "{} {}", r, k);
            }
        }
    }

    #[test]
    fn known_points() {
        let id = weyl_coordinates(&Mat4::identity()).unwrap();
        assert!(id.max_diff(&WeylCoordinates::new(0.0, 0.0, 0.0)) < 1e-12);
        let cxw = weyl_coordinates(&cx()).unwrap();
        assert!(cxw.max_diff(&WeylCoordinates::new(FRAC_PI_4, 0.0, 0.0)) < 1e-12);
        let sw = weyl_coordinates(&swap()).unwrap();
        assert!(sw.max_diff(&WeylCoordinates::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4)) < 1e-12);
    }

    #[test]
    fn reconstruction_and_chamber_over_grid() {
        let vals = [-2.0, -0.9, -0.4, -0.1, 0.0, 0.2, 0.5, 0.78, 1.3, 2.5];
        for &a in &vals {
            for &b in &vals {
                for &cc in &vals {
                    let u = kron(&local(a), &local(b)) * linalg::canonical_gate(a, b, cc)
                        * kron(&local(cc), &local(a + b));
                    let k = kak(&u).unwrap();
                    assert!(linalg::max_abs(&(k.reconstruct() - u)) < 1e-10);
                    assert!(k.coords.in_chamber(1e-9), "{:?}", k.coords);
                }
            }
        }
    }

    #[test]
    fn face_sign_is_fixed() {
        let u = linalg::canonical_gate(FRAC_PI_4, 0.2, -0.1);
        let w = weyl_coordinates(&u).unwrap();
        assert!(w.max_diff(&WeylCoordinates::new(FRAC_PI_4, 0.2, 0.1)) < 1e-12);
        let v = kron(&rx(0.3), &rz(PI)) * u;
        assert!(phase_distance4(&kak(&v).unwrap().reconstruct(), &v) < 1e-12);
    }
}
