//! Heavy-output statistics and the pass decision.

use crate::error::{QvfError, Result};
use crate::rng::substream;
use crate::simkit::ShotCounts;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Fraction of shots that landed in `heavy`.
pub fn hop_of_counts(counts: &ShotCounts, heavy: &BTreeSet<String>) -> Result<f64> {
    if counts.shots == 0 {
        return Err(QvfError::invariant("shots", "must be at least 1"));
    }
    let hits: u64 = counts.counts.iter().filter(|(k, _)| heavy.contains(*k)).map(|(_, v)| v).sum();
    Ok(hits as f64 / counts.shots as f64)
}

/// Probability mass on the heavy indices of an exact distribution.
pub fn hop_of_distribution(probs: &[f64], heavy: &[usize]) -> f64 {
    heavy.iter().map(|&i| probs[i]).sum()
}

/// Standard normal CDF as a percentage.
pub fn confidence(z: f64) -> f64 {
    if z == f64::INFINITY {
        return 100.0;
    }
    50.0 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassRule {
    pub threshold: f64,
    pub z: f64,
}

impl Default for PassRule {
    fn default() -> Self {
        PassRule { threshold: 2.0 / 3.0, z: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopStats {
    pub n_c: usize,
    pub h_mean: f64,
    pub sigma: f64,
    /// +inf when sigma is zero and the mean is above threshold.
    #[serde(with = "lossless_f64")]
    pub z: f64,
    pub confidence: f64,
    pub passed: bool,
}

impl HopStats {
    pub fn from_summary(n_c: usize, h_mean: f64, sigma: f64, rule: PassRule) -> Self {
        let diff = h_mean - rule.threshold;
        let (z, passed) = if sigma > 0.0 {
            let z = diff / sigma;
            (z, z > rule.z)
        } else if diff > 0.0 {
            (f64::INFINITY, true)
        } else if diff < 0.0 {
            (f64::NEG_INFINITY, false)
        } else {
            (0.0, false)
        };
        let confidence = if z == f64::NEG_INFINITY { 0.0 } else { confidence(z) };
        HopStats { n_c, h_mean, sigma, z, confidence, passed }
    }
}

// JSON has no infinities; they are written as strings.
mod lossless_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Num(*v).serialize(s)
        } else if *v > 0.0 {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Text("-inf".into()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad number {t}"))),
        }
    }
}

fn check_list(h: &[f64]) -> Result<()> {
    if h.len() < 2 {
        return Err(QvfError::invariant("n_c", format!("{} circuits, need at least 2", h.len())));
    }
    if let Some(x) = h.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(QvfError::invariant("hop", format!("{} not in [0,1]", x)));
    }
    Ok(())
}

fn mean(h: &[f64]) -> f64 {
    // Sorted summation so permutations give identical bits.
    let mut v = h.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean HOP with σ = √(h(1−h)/n_c).
pub fn aggregate(h: &[f64]) -> Result<HopStats> {
    aggregate_with(h, PassRule::default())
}

pub fn aggregate_with(h: &[f64], rule: PassRule) -> Result<HopStats> {
    check_list(h)?;
    let m = mean(h);
    let sigma = (m * (1.0 - m) / h.len() as f64).max(0.0).sqrt();
    Ok(HopStats::from_summary(h.len(), m, sigma, rule))
}

/// Mean HOP with σ from resampling circuits `reps` times.
pub fn aggregate_bootstrap(h: &[f64], reps: usize, seed: u64, rule: PassRule) -> Result<HopStats> {
    check_list(h)?;
    let mut rng = substream(seed, "bootstrap", &[]);
    let n = h.len();
    let means: Vec<f64> = (0..reps.max(2))
        .map(|_| (0..n).map(|_| h[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let mu = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (means.len() - 1) as f64;
    Ok(HopStats::from_summary(n, mean(h), var.sqrt(), rule))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Running mean and ±2σ band over the first k circuits, k = 2..n_c.
pub fn cumulative_trace(h: &[f64]) -> Result<Vec<TraceRow>> {
    check_list(h)?;
    (2..=h.len())
        .map(|k| {
            let s = aggregate(&h[..k])?;
            Ok(TraceRow { k, mean: s.h_mean, lo: s.h_mean - 2.0 * s.sigma, hi: s.h_mean + 2.0 * s.sigma })
        })
        .collect()
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("k,mean,lo,hi\n");
    for r in rows {
        s.push_str(&format!("{},{:.9},{:.9},{:.9}\n", r.k, r.mean, r.lo, r.hi));
    }
    s
}
