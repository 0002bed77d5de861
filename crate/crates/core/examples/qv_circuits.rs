//! Generates a few QV circuits and prints their heavy sets.

use qvf::qvgen::{circuit_seed, generate_qv_circuit, ideal_heavy_set, ideal_hop, QvSpec};

fn main() -> qvf::Result<()> {
    for i in 0..3 {
        let spec = QvSpec::new(4, 4, circuit_seed(1, i))?;
        let c = generate_qv_circuit(&spec);
        let heavy = ideal_heavy_set(&c)?;
        println!(
            "circuit {i}: {} SU(4) gates, {} heavy outputs, ideal HOP {:.4}",
            c.gate_count(),
            heavy.len(),
            ideal_hop(&c)?
        );
        println!("  heavy: {}", heavy.join(" "));
    }
    Ok(())
}
