//! Experiment configuration and orchestration.
//!
//! Every random draw derives from `qv.seed` (circuits, heuristic routing)
//! or `seed` (simulation) through named substreams, so the stage commands
//! and the end-to-end runs see identical randomness.

mod experiments;
mod stages;

pub use experiments::*;
pub use stages::*;

use crate::error::{QvfError, Result};
use crate::model::DeviceModel;
use crate::router::{Method, RoutingConfig};
use crate::scheduler::Alignment;
use crate::simkit::{NoiseModel, ReadoutProfile, DEFAULT_QUASISTATIC_SIGMA};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const BUILTIN_DEVICES: &[(&str, &str)] = &[
    ("montreal_27", include_str!("../../data/montreal_27.json")),
    ("montreal_chain", include_str!("../../data/montreal_chain.json")),
];

/// Loads `builtin:<name>` or a JSON file path.
pub fn resolve_device(spec: &str) -> Result<DeviceModel> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let (_, text) = BUILTIN_DEVICES
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| QvfError::Config(format!("unknown builtin device {name}")))?;
        return DeviceModel::from_json(text);
    }
    crate::model::load_device(spec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QvSection {
    pub width: usize,
    pub depth: usize,
    pub count: usize,
    pub seed: u64,
}

impl Default for QvSection {
    fn default() -> Self {
        QvSection { width: 6, depth: 6, count: 900, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Device JSON path, or `builtin:montreal_27` / `builtin:montreal_chain`.
    pub device: String,
    /// Noise JSON path; derived from the device calibration when absent.
    pub noise: Option<String>,
    pub noise_profile: ReadoutProfile,
    /// Multiplies error probabilities and divides coherence times.
    pub noise_scale: f64,
    /// Static detuning spread for derived noise, rad/s.
    pub quasistatic_sigma: f64,
    pub qv: QvSection,
    pub routing: RoutingConfig,
    pub method: Method,
    pub alignment: Alignment,
    pub dd: bool,
    pub shots: u64,
    /// Simulation root seed.
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            device: "builtin:montreal_27".into(),
            noise: None,
            noise_profile: ReadoutProfile::Sp,
            noise_scale: 1.0,
            quasistatic_sigma: DEFAULT_QUASISTATIC_SIGMA,
            qv: QvSection::default(),
            routing: RoutingConfig::default(),
            method: Method::Bip,
            alignment: Alignment::Alap,
            dd: true,
            shots: 1000,
            seed: 7,
            out: PathBuf::from("qvf-run"),
        }
    }
}

fn set_path(root: &mut Value, key: &str, v: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, p) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| QvfError::Config(format!("--set {key}: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(p.to_string(), v);
            return Ok(());
        }
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(s).map_err(|e| QvfError::Config(format!("config: {e}")))?;
        Ok(c)
    }

    /// Reads a config file. Relative file paths inside it are taken
    /// relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let p = path.as_ref();
        let s = std::fs::read_to_string(p).map_err(|e| QvfError::Io { path: p.display().to_string(), source: e })?;
        let mut c = ExperimentConfig::from_json(&s)?;
        let base = p.parent().unwrap_or(Path::new(""));
        let rebase = |s: &str| -> String {
            if s.starts_with("builtin:") || Path::new(s).is_absolute() {
                s.to_string()
            } else {
                base.join(s).display().to_string()
            }
        };
        c.device = rebase(&c.device);
        c.noise = c.noise.as_deref().map(rebase);
        if c.out.is_relative() {
            c.out = base.join(&c.out);
        }
        Ok(c)
    }

    /// Applies `key=value` overrides; values parse as JSON, else as strings.
    pub fn with_overrides(&self, sets: &[String]) -> Result<Self> {
        let mut v = serde_json::to_value(self).expect("config serializes");
        for s in sets {
            let (k, val) = s.split_once('=').ok_or_else(|| QvfError::Config(format!("--set {s}: expected key=value")))?;
            let parsed = serde_json::from_str(val).unwrap_or_else(|_| Value::String(val.to_string()));
            set_path(&mut v, k.trim(), parsed)?;
        }
        serde_json::from_value(v).map_err(|e| QvfError::Config(format!("config override: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical (key-sorted) JSON form, output path excluded.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().unwrap().remove("out");
        hex(&Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn check(&self) -> Result<()> {
        self.routing.check()?;
        crate::qvgen::QvSpec::new(self.qv.width, self.qv.depth, self.qv.seed)?;
        if self.qv.count < 2 {
            return Err(QvfError::invariant("qv.count", "need at least 2 circuits"));
        }
        if self.shots == 0 {
            return Err(QvfError::invariant("shots", "must be positive"));
        }
        if !(self.noise_scale >= 0.0) {
            return Err(QvfError::invariant("noise_scale", "must be nonnegative"));
        }
        if !(self.quasistatic_sigma >= 0.0) {
            return Err(QvfError::invariant("quasistatic_sigma", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn device_model(&self) -> Result<DeviceModel> {
        resolve_device(&self.device)
    }

    /// Noise from file or device calibration, scaled by `noise_scale`.
    pub fn noise_model(&self, device: &DeviceModel) -> Result<NoiseModel> {
        let base = match &self.noise {
            Some(p) => {
                let mut n = NoiseModel::load(p)?;
                n.profile = self.noise_profile;
                n
            }
            None => NoiseModel::from_device(device, self.noise_profile, self.quasistatic_sigma),
        };
        Ok(if self.noise_scale == 1.0 { base } else { base.scaled(self.noise_scale) })
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs `f` on a pool bounded by QVF_THREADS (all cores when unset).
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match std::env::var("QVF_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| QvfError::Config(format!("QVF_THREADS={s} is not a positive integer")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| QvfError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
