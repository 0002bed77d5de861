use super::weyl::WeylCoordinates;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Average gate fidelity of the best approximation using a given number of
/// entanglers.
///
/// `f_exact[i]` is the fidelity of the closest gate that needs exactly `i`
/// entanglers. `f_avg[i]` is the best achievable with at most `i`, which is
/// what a synthesizer allowed `i` uses can reach; it is nondecreasing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityTable {
    pub f_avg: [f64; 4],
    pub f_exact: [f64; 4],
}

fn fid(tr: Complex64) -> f64 {
    (4.0 + tr.norm_sqr()) / 20.0
}

pub fn fidelity_table(w: &WeylCoordinates) -> FidelityTable {
    let (a, b, c) = (w.c1, w.c2, w.c3);
    let t0 = Complex64::new(a.cos() * b.cos() * c.cos(), a.sin() * b.sin() * c.sin()) * 4.0;
    let d = FRAC_PI_4 - a;
    let t1 = Complex64::new(d.cos() * b.cos() * c.cos(), d.sin() * b.sin() * c.sin()) * 4.0;
    let t2 = Complex64::new(4.0 * c.cos(), 0.0);
    let t3 = Complex64::new(4.0, 0.0);
    let f_exact = [fid(t0), fid(t1), fid(t2), fid(t3)];
    let mut f_avg = f_exact;
    for i in 1..4 {
        f_avg[i] = f_avg[i].max(f_avg[i - 1]);
    }
    FidelityTable { f_avg, f_exact }
}

impl FidelityTable {
    /// (i*, f_avg[i*]·F_b^{i*}), smallest i on ties.
    pub fn best(&self, fb: f64) -> (usize, f64) {
        let mut best = (0usize, self.f_avg[0]);
        let mut w = 1.0;
        for i in 1..4 {
            w *= fb;
            let v = self.f_avg[i] * w;
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let id = fidelity_table(&WeylCoordinates::new(0.0, 0.0, 0.0));
        assert!((id.f_avg[0] - 1.0).abs() < 1e-15);
        let cx = fidelity_table(&WeylCoordinates::new(FRAC_PI_4, 0.0, 0.0));
        assert!((cx.f_avg[1] - 1.0).abs() < 1e-15);
        assert!(cx.f_avg[0] < 1.0);
        assert_eq!(cx.best(0.99).0, 1);
        // Exact one-entangler approximation of the identity is worse than none.
        assert!(id.f_exact[1] < id.f_exact[0]);
        assert_eq!(id.f_avg[1], id.f_avg[0]);
    }
}
