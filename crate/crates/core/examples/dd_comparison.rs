//! Same circuits with and without dynamical decoupling.

use qvf::pipeline::{run_dd_ab, ExperimentConfig};

fn main() -> qvf::Result<()> {
    let cfg = ExperimentConfig::default().with_overrides(&["qv.count=40".into(), "shots=500".into()])?;
    let r = run_dd_ab(&cfg)?;
    println!(
        "{} circuits: {:.1}% improved, mean HOP change {:+.4} ± {:.4}",
        r.n,
        100.0 * r.fraction_improved,
        r.mean_increase,
        r.std_error
    );
    Ok(())
}
