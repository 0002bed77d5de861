//! Exact vs heuristic routing and ECR vs CX lowering over a circuit batch.

use qvf::pipeline::{run_router_ab, ExperimentConfig};

fn main() -> qvf::Result<()> {
    let cfg = ExperimentConfig::default().with_overrides(&["qv.count=100".into()])?;
    let r = run_router_ab(&cfg)?;
    println!("entanglers  bip {:.2} (max {})  heuristic {:.2} (max {})", r.bip_entanglers.mean, r.bip_entanglers.max, r.heuristic_entanglers.mean, r.heuristic_entanglers.max);
    println!("SQ pulses   bip {:.2}  heuristic {:.2}", r.bip_sq.mean, r.heuristic_sq.mean);
    println!("bip cost at least heuristic's on {:.0}% of circuits", 100.0 * r.bip_dominates);
    println!("ECR lowering shortens mean duration by {:.1}%", 100.0 * r.ecr_duration_reduction);
    Ok(())
}
