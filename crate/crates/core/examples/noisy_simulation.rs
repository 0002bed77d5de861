//! Trajectory simulation of one scheduled circuit at several noise levels.

use qvf::model::load_device;
use qvf::qvgen::{generate_qv_circuit, ideal_heavy_set, ideal_hop, QvSpec};
use qvf::router::{apply_layout, route_bip, RoutingConfig};
use qvf::scheduler::{insert_dd, schedule, Alignment, DdPolicy};
use qvf::simkit::{simulate_noisy, NoiseModel, ReadoutProfile, DEFAULT_QUASISTATIC_SIGMA};
use qvf::stats::hop_of_counts;

fn main() -> qvf::Result<()> {
    let device = load_device(concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_chain.json"))?;
    let cfg = RoutingConfig::default();
    let c = generate_qv_circuit(&QvSpec::new(6, 6, 11)?);
    let heavy = ideal_heavy_set(&c)?.into_iter().collect();
    let phys = apply_layout(&c, &route_bip(&c, &device, &cfg)?, &device, &cfg)?;
    let s = insert_dd(&schedule(&phys, &device, Alignment::Alap)?, &DdPolicy::for_device(&device))?;
    println!("ideal HOP {:.4}", ideal_hop(&c)?);
    let base = NoiseModel::from_device(&device, ReadoutProfile::Sp, DEFAULT_QUASISTATIC_SIGMA);
    for scale in [0.0, 0.1, 1.0, 3.0] {
        let counts = simulate_noisy(&s, &device, &base.scaled(scale), 2000, 1)?;
        println!("noise x{scale}: HOP {:.4}", hop_of_counts(&counts, &heavy)?);
    }
    Ok(())
}
