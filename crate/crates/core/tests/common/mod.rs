//! Test-side helpers built without the library's synthesis code.
#![allow(dead_code)]

pub mod routing;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C;
use qvf::rng::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type M2 = Matrix2<C>;
pub type M4 = Matrix4<C>;

pub fn gauss(rng: &mut Rng) -> C {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C::new(re, im)
}

/// Haar-random U(2) via normalized Gram-Schmidt of a Gaussian matrix.
pub fn random_u2(rng: &mut Rng) -> M2 {
    let a = M2::from_fn(|_, _| gauss(rng));
    let q = a.qr().q();
    let r = a.qr().r();
    let ph = M2::from_diagonal(&nalgebra::Vector2::new(r[(0, 0)] / r[(0, 0)].norm(), r[(1, 1)] / r[(1, 1)].norm()));
    q * ph
}

pub fn kron(a: &M2, b: &M2) -> M4 {
    M4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn random_local(rng: &mut Rng) -> M4 {
    kron(&random_u2(rng), &random_u2(rng))
}

/// Haar-random normalized two-qubit state.
pub fn random_state(rng: &mut Rng) -> Vector4<C> {
    let v = Vector4::from_fn(|_, _| gauss(rng));
    v / C::new(v.norm(), 0.0)
}

pub fn cnot() -> M4 {
    let o = C::new(1.0, 0.0);
    let z = C::new(0.0, 0.0);
    M4::new(o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z)
}

/// exp(i(a·XX + b·YY + c·ZZ)) from its Bell-basis eigenvalues.
pub fn canonical(a: f64, b: f64, c: f64) -> M4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Bell states as columns: Φ+, Φ-, Ψ+, Ψ-.
    let bell = M4::new(
        C::new(s, 0.0), C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0),
        C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(s, 0.0), C::new(s, 0.0),
        C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(s, 0.0), C::new(-s, 0.0),
        C::new(s, 0.0), C::new(-s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0),
    );
    // (XX, YY, ZZ) eigenvalues on Φ+, Φ-, Ψ+, Ψ-.
    let ev = [(1.0, -1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 1.0, -1.0), (-1.0, -1.0, -1.0)];
    let d = M4::from_diagonal(&Vector4::from_fn(|k, _| {
        let (x, y, z) = ev[k];
        C::from_polar(1.0, a * x + b * y + c * z)
    }));
    bell * d * bell.adjoint()
}

/// Makhlin local invariants (G1 complex, G2 real).
pub fn makhlin(u: &M4) -> (C, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = M4::new(
        C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, s),
        C::new(0.0, 0.0), C::new(0.0, s), C::new(s, 0.0), C::new(0.0, 0.0),
        C::new(0.0, 0.0), C::new(0.0, s), C::new(-s, 0.0), C::new(0.0, 0.0),
        C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, -s),
    );
    let ub = q.adjoint() * u * q;
    let m = ub.transpose() * ub;
    let det = u.determinant();
    let t = m.trace();
    let g1 = t * t / (det * 16.0);
    let g2 = (t * t - (m * m).trace()) / (det * 4.0);
    (g1, g2.re)
}

/// Largest |tr(U†V)| over V = L_k·CX·…·CX·L_0 with k CNOTs and arbitrary
/// local unitaries L_j = x_j⊗y_j, by alternating polar maximization over
/// each single-qubit factor with random restarts.
pub fn best_trace(u: &M4, k: usize, rng: &mut Rng, restarts: usize) -> f64 {
    let mut best = 0.0f64;
    for _ in 0..restarts {
        let mut f: Vec<(M2, M2)> = (0..=k).map(|_| (random_u2(rng), random_u2(rng))).collect();
        // V = P·L_j·Q, P holding the later factors.
        let split = |f: &[(M2, M2)], j: usize| -> (M4, M4) {
            let mut p = M4::identity();
            for t in (j + 1..=k).rev() {
                p = p * kron(&f[t].0, &f[t].1) * cnot();
            }
            let mut q = M4::identity();
            for t in (0..j).rev() {
                q = q * cnot() * kron(&f[t].0, &f[t].1);
            }
            (p, q)
        };
        let value = |f: &[(M2, M2)]| {
            let (p, q) = split(f, 0);
            (u.adjoint() * p * kron(&f[0].0, &f[0].1) * q).trace().norm()
        };
        let mut last = -1.0;
        for _ in 0..500 {
            for j in 0..=k {
                let (p, q) = split(&f, j);
                let m = q * u.adjoint() * p;
                for side in 0..2 {
                    let (x, y) = f[j];
                    // tr(M·(x⊗y)) = tr(x·Yx) = tr(y·Yy).
                    let w = M2::from_fn(|r, c| {
                        let mut s = C::new(0.0, 0.0);
                        for a in 0..2 {
                            for b in 0..2 {
                                s += if side == 0 {
                                    m[(2 * r + a, 2 * c + b)] * y[(b, a)]
                                } else {
                                    m[(2 * a + r, 2 * b + c)] * x[(b, a)]
                                };
                            }
                        }
                        s
                    });
                    let svd = w.svd(true, true);
                    let opt = svd.v_t.unwrap().adjoint() * svd.u.unwrap().adjoint();
                    if side == 0 {
                        f[j].0 = opt;
                    } else {
                        f[j].1 = opt;
                    }
                }
            }
            let v = value(&f);
            if v - last < 1e-13 {
                break;
            }
            last = v;
        }
        best = best.max(value(&f));
    }
    best
}

pub fn fidelity_from_trace(t: f64) -> f64 {
    (4.0 + t * t) / 20.0
}

pub fn to_m4(u: &qvf::linalg::Mat4) -> M4 {
    *u
}

/// Dense state-vector evolution from |0…0⟩, qubit 0 as the most
/// significant bit. Measure and barrier are skipped.
pub fn oracle_state(c: &qvf::model::Circuit) -> Vec<C> {
    let n = c.width;
    let dim = 1usize << n;
    let mut psi = vec![C::new(0.0, 0.0); dim];
    psi[0] = C::new(1.0, 0.0);
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    for g in c.gates() {
        if let Some(u) = g.matrix2() {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            let mut out = vec![C::new(0.0, 0.0); dim];
            for i in 0..dim {
                let col = 2 * bit(i, a) + bit(i, b);
                let base = i & !(1 << (n - 1 - a)) & !(1 << (n - 1 - b));
                for row in 0..4 {
                    let j = base | ((row >> 1) << (n - 1 - a)) | ((row & 1) << (n - 1 - b));
                    out[j] += u[(row, col)] * psi[i];
                }
            }
            psi = out;
        } else if let Some(u) = g.matrix1() {
            let q = g.qubits[0];
            let mut out = vec![C::new(0.0, 0.0); dim];
            for i in 0..dim {
                let col = bit(i, q);
                let base = i & !(1 << (n - 1 - q));
                for row in 0..2 {
                    out[base | (row << (n - 1 - q))] += u[(row, col)] * psi[i];
                }
            }
            psi = out;
        }
    }
    psi
}

pub fn oracle_probs(c: &qvf::model::Circuit) -> Vec<f64> {
    oracle_state(c).iter().map(|z| z.norm_sqr()).collect()
}

/// Ideal distribution over clbit strings for a circuit whose measurements
/// map physical qubits to clbits (clbit 0 is the leading bit).
pub fn oracle_clbits(c: &qvf::model::Circuit) -> Vec<f64> {
    let n = c.width;
    let map: Vec<(usize, usize)> = c
        .gates()
        .filter_map(|g| match g.kind {
            qvf::model::GateKind::Measure { clbit } => Some((g.qubits[0], clbit)),
            _ => None,
        })
        .collect();
    let m = map.len();
    let mut out = vec![0.0; 1 << m];
    for (i, p) in oracle_probs(c).iter().enumerate() {
        let k = map.iter().filter(|&&(q, _)| (i >> (n - 1 - q)) & 1 == 1).fold(0, |k, &(_, cb)| k | 1 << (m - 1 - cb));
        out[k] += p;
    }
    out
}
