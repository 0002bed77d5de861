//! Small fixed-size complex matrix helpers.
//!
//! Two-qubit matrices act on an ordered pair (q0, q1) with basis index
//! `2*bit(q0) + bit(q1)`, so `kron(a, b)` puts `a` on q0.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn id2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// exp(-i θ Z / 2)
pub fn rz(theta: f64) -> Mat2 {
    Mat2::new(cis(-theta / 2.0), ZERO, ZERO, cis(theta / 2.0))
}

/// exp(-i θ X / 2)
pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// exp(-i θ Y / 2)
pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// diag(1, e^{iθ}); equal to rz(θ) up to global phase.
pub fn phase(theta: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, cis(theta))
}

pub fn sx() -> Mat2 {
    let a = c(0.5, 0.5);
    let b = c(0.5, -0.5);
    Mat2::new(a, b, b, a)
}

pub fn xp() -> Mat2 {
    rx(PI)
}

pub fn xm() -> Mat2 {
    rx(-PI)
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    m
}

pub fn cx() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// Echoed cross-resonance gate with control q0: (X⊗I − Y⊗X)/√2.
pub fn ecr() -> Mat4 {
    (kron(&pauli_x(), &id2()) - kron(&pauli_y(), &pauli_x())) * c(FRAC_1_SQRT_2, 0.0)
}

pub fn swap() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// Operator with the two qubits exchanged (middle rows and columns swapped).
pub fn reverse_qubits(u: &Mat4) -> Mat4 {
    let s = swap();
    s * u * s
}

/// exp(i (a XX + b YY + c ZZ))
pub fn canonical_gate(a: f64, b: f64, cc: f64) -> Mat4 {
    // XX, YY, ZZ commute; diagonal in the Bell basis.
    let xx = kron(&pauli_x(), &pauli_x());
    let yy = kron(&pauli_y(), &pauli_y());
    let zz = kron(&pauli_z(), &pauli_z());
    let e = |m: &Mat4, t: f64| Mat4::identity() * c(t.cos(), 0.0) + m * c(0.0, t.sin());
    e(&xx, a) * e(&yy, b) * e(&zz, cc)
}

pub fn unitarity_error2(u: &Mat2) -> f64 {
    max_abs(&(u.adjoint() * u - Mat2::identity()))
}

pub fn unitarity_error4(u: &Mat4) -> f64 {
    max_abs(&(u.adjoint() * u - Mat4::identity()))
}

pub fn unitarity_error_d(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    max_abs_d(&(u.adjoint() * u - DMatrix::<C64>::identity(n, n)))
}

pub fn max_abs<R: nalgebra::Dim, Cc: nalgebra::Dim, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_d(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Phase that best aligns `b` onto `a` (maximizes Re tr(a† e^{iφ} b)).
fn align_phase<R: nalgebra::Dim, Cc: nalgebra::Dim, S1, S2>(
    a: &nalgebra::Matrix<C64, R, Cc, S1>,
    b: &nalgebra::Matrix<C64, R, Cc, S2>,
) -> C64
where
    S1: nalgebra::RawStorage<C64, R, Cc>,
    S2: nalgebra::RawStorage<C64, R, Cc>,
{
    let mut t = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        t += x.conj() * y;
    }
    if t.norm() < 1e-300 {
        ONE
    } else {
        (t / t.norm()).conj()
    }
}

/// Global-phase-free spectral-norm distance between two 4×4 operators.
pub fn phase_distance4(a: &Mat4, b: &Mat4) -> f64 {
    let ph = align_phase(a, b);
    let d = a - b * ph;
    d.singular_values().max()
}

pub fn phase_distance2(a: &Mat2, b: &Mat2) -> f64 {
    let ph = align_phase(a, b);
    let d = a - b * ph;
    d.singular_values().max()
}

/// Global-phase-free max-entry distance, for large matrices.
pub fn phase_distance_d(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let ph = align_phase(a, b);
    max_abs_d(&(a - b * ph))
}

/// |tr(a† b)|
pub fn trace_overlap4(a: &Mat4, b: &Mat4) -> f64 {
    (a.adjoint() * b).trace().norm()
}

/// Average gate fidelity between two 4×4 unitaries.
pub fn average_fidelity4(a: &Mat4, b: &Mat4) -> f64 {
    let t = trace_overlap4(a, b);
    (4.0 + t * t) / 20.0
}

/// Divide by det^{1/4} so the result has unit determinant.
pub fn to_su4(u: &Mat4) -> Mat4 {
    let det = u.determinant();
    u * cis(-det.arg() / 4.0)
}

/// Split a 4×4 operator that is (close to) a product L⊗R into its factors.
/// The returned pair satisfies `kron(l, r) ≈ k` including phase.
pub fn factor_kron(k: &Mat4) -> (Mat2, Mat2) {
    // Pick the 2×2 block with the largest norm as R up to scale.
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for i in 0..2 {
        for j in 0..2 {
            let blk = k.fixed_view::<2, 2>(2 * i, 2 * j);
            let n: f64 = blk.iter().map(|z| z.norm_sqr()).sum();
            if n > best_norm {
                best_norm = n;
                best = (i, j);
            }
        }
    }
    let blk: Mat2 = k.fixed_view::<2, 2>(2 * best.0, 2 * best.1).into_owned();
    let det = blk.determinant();
    let r = blk / det.sqrt();
    let rd = r.adjoint();
    let mut l = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let b = k.fixed_view::<2, 2>(2 * i, 2 * j);
            l[(i, j)] = (rd * b).trace() / 2.0;
        }
    }
    (l, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sx_squared_is_x_up_to_phase() {
        assert!(phase_distance2(&(sx() * sx()), &pauli_x()) < 1e-14);
    }

    #[test]
    fn xp_xm_cancel() {
        assert!(max_abs(&(xp() * xm() - id2())) < 1e-15);
    }

    #[test]
    fn ecr_is_zx_rotation_times_x() {
        let zx = kron(&pauli_z(), &pauli_x());
        let rot = Mat4::identity() * c(FRAC_1_SQRT_2, 0.0) + zx * c(0.0, FRAC_1_SQRT_2);
        let expect = rot * kron(&pauli_x(), &id2());
        assert!(max_abs(&(ecr() - expect)) < 1e-15);
    }

    #[test]
    fn cx_from_ecr_dressing() {
        let lhs = kron(&rz(PI / 2.0), &rx(PI / 2.0)) * ecr() * kron(&pauli_x(), &id2());
        assert!(phase_distance4(&cx(), &lhs) < 1e-14);
    }

    #[test]
    fn factor_kron_roundtrip() {
        let a = rz(0.3) * ry(1.1) * rz(-0.7);
        let b = rx(0.2) * rz(2.1) * c(0.0, 1.0);
        let (l, r) = factor_kron(&kron(&a, &b));
        assert!(max_abs(&(kron(&l, &r) - kron(&a, &b))) < 1e-14);
    }

    #[test]
    fn reverse_is_swap_conjugation() {
        let u = kron(&rx(0.4), &rz(1.3)) * cx();
        let v = reverse_qubits(&u);
        let expect = kron(&rz(1.3), &rx(0.4)) * cx_reversed();
        assert!(max_abs(&(v - expect)) < 1e-14);
    }

    fn cx_reversed() -> Mat4 {
        let h = (pauli_x() + pauli_z()) * c(FRAC_1_SQRT_2, 0.0);
        let hh = kron(&h, &h);
        hh * cx() * hh
    }
}
