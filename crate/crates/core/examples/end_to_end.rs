//! Full QV run on the built-in line device with errors reduced tenfold.
//!
//! `cargo run --release --example end_to_end -- [count]`

use qvf::pipeline::{run_qv, ExperimentConfig};

fn main() -> qvf::Result<()> {
    let count: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let dir = std::env::temp_dir().join("qvf-end-to-end");
    let cfg = ExperimentConfig::default().with_overrides(&[
        format!("qv.count={count}"),
        "noise_scale=0.1".into(),
        format!("out={}", serde_json::to_string(&dir).unwrap()),
    ])?;
    let o = run_qv(&cfg)?;
    let s = o.report.stats;
    println!("{} circuits: h_mean {:.4} z {:.2} passed {}", s.n_c, s.h_mean, s.z, s.passed);
    println!("artifacts in {}", o.out.display());
    Ok(())
}
