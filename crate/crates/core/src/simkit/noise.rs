use crate::error::{QvfError, Result};
use crate::model::{DeviceModel, ReadoutQubitModel};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default static detuning spread, 2π·50 kHz in rad/s.
pub const DEFAULT_QUASISTATIC_SIGMA: f64 = 2.0 * PI * 50e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutProfile {
    #[default]
    Sp,
    Esp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitNoise {
    pub id: u32,
    pub sq_depol: f64,
    /// Zero disables relaxation (likewise for `t2_us`).
    pub t1_us: f64,
    pub t2_us: f64,
    /// Standard deviation of the static detuning, rad/s.
    pub quasistatic_sigma: f64,
    pub readout: ReadoutQubitModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_esp: Option<ReadoutQubitModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeNoise {
    pub control: u32,
    pub target: u32,
    pub tq_depol: f64,
}

/// Noise parameters keyed by hardware qubit id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub profile: ReadoutProfile,
    pub qubits: Vec<QubitNoise>,
    pub edges: Vec<EdgeNoise>,
}

/// Depolarizing probability (uniform over non-identity Paulis) whose
/// average gate infidelity equals `r` on `n` qubits.
pub fn depol_from_rb(r: f64, n: u32) -> f64 {
    let d = (1u64 << n) as f64;
    (r * (d + 1.0) / d).min(1.0)
}

impl NoiseModel {
    /// Gate errors, coherence and readout taken from the device calibration.
    pub fn from_device(device: &DeviceModel, profile: ReadoutProfile, quasistatic_sigma: f64) -> Self {
        let qubits = device
            .qubits
            .iter()
            .map(|q| QubitNoise {
                id: q.id,
                sq_depol: depol_from_rb(q.sq_error, 1),
                t1_us: q.t1_us,
                t2_us: q.t2_us,
                quasistatic_sigma,
                readout: q.readout,
                readout_esp: q.readout_esp,
            })
            .collect();
        let edges = device
            .edges
            .iter()
            .map(|e| EdgeNoise {
                control: e.control,
                target: e.target,
                tq_depol: depol_from_rb(e.cx_variant().or(e.variants.first()).map_or(0.0, |v| v.error), 2),
            })
            .collect();
        NoiseModel { profile, qubits, edges }
    }

    /// No noise at all on the device's qubits.
    pub fn ideal(device: &DeviceModel) -> Self {
        NoiseModel::from_device(device, ReadoutProfile::Sp, 0.0).scaled(0.0)
    }

    /// Gate and readout error probabilities multiplied by `f`, coherence
    /// times divided by `f` (disabled at `f = 0`). Quasi-static spread is
    /// scaled by `f` too.
    pub fn scaled(&self, f: f64) -> Self {
        let mut n = self.clone();
        let ro = |r: &ReadoutQubitModel| ReadoutQubitModel {
            p01: (r.p01 * f).min(1.0),
            p10: (r.p10 * f).min(1.0),
            reset_error: (r.reset_error * f).min(1.0),
        };
        for q in n.qubits.iter_mut() {
            q.sq_depol = (q.sq_depol * f).min(1.0);
            q.quasistatic_sigma *= f;
            q.t1_us = if f == 0.0 { 0.0 } else { q.t1_us / f };
            q.t2_us = if f == 0.0 { 0.0 } else { q.t2_us / f };
            q.readout = ro(&q.readout);
            q.readout_esp = q.readout_esp.as_ref().map(ro);
        }
        for e in n.edges.iter_mut() {
            e.tq_depol = (e.tq_depol * f).min(1.0);
        }
        n
    }

    pub fn with_quasistatic_sigma(mut self, sigma: f64) -> Self {
        for q in self.qubits.iter_mut() {
            q.quasistatic_sigma = sigma;
        }
        self
    }

    /// Only T1/T2 idle relaxation remains.
    pub fn markovian_only(&self) -> Self {
        let mut n = self.clone();
        for q in n.qubits.iter_mut() {
            q.sq_depol = 0.0;
            q.quasistatic_sigma = 0.0;
            q.readout = ReadoutQubitModel::perfect();
            q.readout_esp = None;
        }
        for e in n.edges.iter_mut() {
            e.tq_depol = 0.0;
        }
        n
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let n: NoiseModel = serde_json::from_str(s).map_err(|e| QvfError::Parse(e.to_string()))?;
        n.check()?;
        Ok(n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("noise serializes")
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let p = path.as_ref();
        let s = std::fs::read_to_string(p).map_err(|e| QvfError::Io { path: p.display().to_string(), source: e })?;
        NoiseModel::from_json(&s)
    }

    pub fn check(&self) -> Result<()> {
        let prob = |field: String, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(QvfError::invariant(field, format!("{} not in [0,1]", v)))
            }
        };
        for q in &self.qubits {
            prob(format!("qubit {}.sq_depol", q.id), q.sq_depol)?;
            for (n, r) in [("readout", Some(q.readout)), ("readout_esp", q.readout_esp)] {
                if let Some(r) = r {
                    prob(format!("qubit {}.{}.p01", q.id, n), r.p01)?;
                    prob(format!("qubit {}.{}.p10", q.id, n), r.p10)?;
                    prob(format!("qubit {}.{}.reset_error", q.id, n), r.reset_error)?;
                }
            }
            if !(q.t1_us >= 0.0 && q.t2_us >= 0.0 && q.quasistatic_sigma >= 0.0) {
                return Err(QvfError::invariant(format!("qubit {}", q.id), "rates must be non-negative"));
            }
            if q.t1_us > 0.0 && q.t2_us > 2.0 * q.t1_us {
                return Err(QvfError::invariant(
                    format!("qubit {}.t2_us", q.id),
                    format!("T2 = {} exceeds 2·T1 = {}", q.t2_us, 2.0 * q.t1_us),
                ));
            }
        }
        for e in &self.edges {
            prob(format!("edge {}-{}.tq_depol", e.control, e.target), e.tq_depol)?;
        }
        Ok(())
    }

    /// Per-physical-qubit parameters for `device`.
    pub fn bind(&self, device: &DeviceModel) -> Result<BoundNoise> {
        self.check()?;
        let mut qubits = Vec::with_capacity(device.width());
        for p in 0..device.width() {
            let id = device.id(p);
            let q = self
                .qubits
                .iter()
                .find(|q| q.id == id)
                .ok_or_else(|| QvfError::Config(format!("noise model has no entry for qubit id {}", id)))?;
            let readout = match self.profile {
                ReadoutProfile::Sp => q.readout,
                ReadoutProfile::Esp => q.readout_esp.ok_or_else(|| {
                    QvfError::Config(format!("esp profile selected but qubit {} has no readout_esp", id))
                })?,
            };
            qubits.push(BoundQubit {
                sq_depol: q.sq_depol,
                t1_ps: if q.t1_us > 0.0 { q.t1_us * 1e6 } else { f64::INFINITY },
                tphi_ps: tphi_us(q.t1_us, q.t2_us) * 1e6,
                sigma_per_ps: q.quasistatic_sigma * 1e-12,
                readout,
            });
        }
        let w = device.width();
        let mut tq = vec![vec![0.0; w]; w];
        for e in &self.edges {
            if let (Some(a), Some(b)) = (device.index_of(e.control), device.index_of(e.target)) {
                tq[a][b] = e.tq_depol;
                tq[b][a] = e.tq_depol;
            }
        }
        Ok(BoundNoise { qubits, tq_depol: tq })
    }
}

/// Pure dephasing time from 1/Tφ = 1/T2 − 1/(2·T1); infinite when T2 = 2·T1.
/// Zero times count as disabled.
pub fn tphi_us(t1: f64, t2: f64) -> f64 {
    let inv = |t: f64| if t > 0.0 { 1.0 / t } else { 0.0 };
    let rate = inv(t2) - 0.5 * inv(t1);
    if rate <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}

#[derive(Clone, Debug)]
pub struct BoundQubit {
    pub sq_depol: f64,
    pub t1_ps: f64,
    pub tphi_ps: f64,
    pub sigma_per_ps: f64,
    pub readout: ReadoutQubitModel,
}

/// Noise resolved to physical indices.
#[derive(Clone, Debug)]
pub struct BoundNoise {
    pub qubits: Vec<BoundQubit>,
    pub tq_depol: Vec<Vec<f64>>,
}

impl BoundNoise {
    /// True when evolution is unitary (readout and reset may still be noisy).
    pub fn evolution_is_ideal(&self) -> bool {
        self.qubits.iter().all(|q| {
            q.sq_depol == 0.0 && !q.t1_ps.is_finite() && !q.tphi_ps.is_finite() && q.sigma_per_ps == 0.0
        }) && self.tq_depol.iter().flatten().all(|&p| p == 0.0)
    }
}
