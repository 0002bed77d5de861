//! Exact and heuristic routing of one QV circuit onto a 6-qubit line.

use qvf::model::load_device;
use qvf::qvgen::{generate_qv_circuit, QvSpec};
use qvf::router::{apply_layout, route_bip, route_heuristic, RoutingConfig};

fn main() -> qvf::Result<()> {
    let device = load_device(concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_chain.json"))?;
    let c = generate_qv_circuit(&QvSpec::new(6, 6, 42)?);
    let cfg = RoutingConfig::default();
    for (name, sol) in [("bip", route_bip(&c, &device, &cfg)?), ("heuristic", route_heuristic(&c, &device, &cfg)?)] {
        let phys = apply_layout(&c, &sol, &device, &cfg)?;
        println!(
            "{name:>9}: cost {:.4} swaps {} mirrored {} entanglers {} SQ pulses {} optimal {}",
            sol.cost(),
            sol.swap_count(),
            sol.mirrored().count(),
            phys.entangler_count(),
            phys.sx_count(),
            sol.optimal
        );
    }
    let sol = route_bip(&c, &device, &cfg)?;
    println!("initial layout {:?}, final {:?}", sol.layer_mappings[0], sol.final_mapping);
    for s in &sol.swaps {
        println!("  swap on {:?} after layer {}", s.edge, s.window);
    }
    Ok(())
}
