//! Assignment matrices for standard and excited-state-promoted readout.

use qvf::model::load_device;
use qvf::simkit::{assignment_matrix, ground_state_error, total_assignment_error, NoiseModel, ReadoutProfile};

fn main() -> qvf::Result<()> {
    let device = load_device(concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_chain.json"))?;
    for p in [ReadoutProfile::Sp, ReadoutProfile::Esp] {
        let noise = NoiseModel::from_device(&device, p, 0.0);
        let a = assignment_matrix(&noise, 6)?;
        println!(
            "{p:?}: total assignment error {:.4}, all-zeros error {:.4}",
            total_assignment_error(&a),
            ground_state_error(&a)
        );
    }
    Ok(())
}
