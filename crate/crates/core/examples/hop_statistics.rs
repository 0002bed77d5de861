//! Pass decision and running trace for a list of per-circuit HOPs.

use qvf::stats::{aggregate, aggregate_bootstrap, cumulative_trace, PassRule};

fn main() -> qvf::Result<()> {
    let h: Vec<f64> = (0..900).map(|i| 0.701 + 0.08 * ((i as f64) * 0.7).sin()).collect();
    let s = aggregate(&h)?;
    println!("h_mean {:.4}  2sigma {:.4}  z {:.3}  confidence {:.3}%  passed {}", s.h_mean, 2.0 * s.sigma, s.z, s.confidence, s.passed);
    let b = aggregate_bootstrap(&h, 10_000, 1, PassRule::default())?;
    println!("bootstrap sigma {:.5} vs binomial {:.5}", b.sigma, s.sigma);
    let t = cumulative_trace(&h)?;
    let first = t.iter().position(|r| r.lo > 2.0 / 3.0).map(|k| t[k].k);
    println!("lower band first above 2/3 at k = {first:?}");
    Ok(())
}
