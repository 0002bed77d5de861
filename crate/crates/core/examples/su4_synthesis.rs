//! Weyl coordinates, the fidelity table and pulse counts for a random SU(4).

use qvf::linalg::phase_distance4;
use qvf::qvgen::haar_su4;
use qvf::rng::substream;
use qvf::synth::{best_approximation, fidelity_table, synthesize_pulse_efficient, weyl_coordinates, Entangler};

fn main() -> qvf::Result<()> {
    let u = haar_su4(&mut substream(3, "example", &[]));
    let w = weyl_coordinates(&u)?;
    println!("Weyl coordinates ({:.4}, {:.4}, {:.4})", w.c1, w.c2, w.c3);
    let t = fidelity_table(&w);
    for i in 0..4 {
        println!("  f_avg[{i}] = {:.6}", t.f_avg[i]);
    }
    for e in [Entangler::Cx, Entangler::Ecr] {
        let d = synthesize_pulse_efficient(&u, e, true);
        println!(
            "{e:?}: {} entanglers, {} SQ pulses ({} outside), error {:.2e}",
            d.entangler_count,
            d.sq_pulse_count,
            d.outer_pulse_count,
            phase_distance4(&d.matrix(), &u)
        );
    }
    for fb in [0.999, 0.99, 0.95] {
        let (i, d) = best_approximation(&u, fb, Entangler::Cx, true);
        println!("F_b = {fb}: use {i} entanglers, predicted fidelity {:.5}", d.predicted_fidelity);
    }
    Ok(())
}
