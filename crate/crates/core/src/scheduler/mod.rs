//! Duration-aware scheduling, idle windows and dynamical decoupling.
//!
//! All times are integer picoseconds on the device grid. Zero-duration gates
//! (Phase, Barrier) are kept in the schedule but never count as activity, so
//! idle windows run from the end of one pulse to the start of the next.

use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel, Gate, GateKind, GateRecord};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub gate: Gate,
    pub start_ps: u64,
    pub duration_ps: u64,
}

impl ScheduleEntry {
    pub fn end_ps(&self) -> u64 {
        self.start_ps + self.duration_ps
    }
}

/// Entries sorted by (start, insertion order). Ties keep program order, so
/// zero-duration gates stay on the right side of their neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub width: usize,
    pub dt_ps: u64,
    pub entries: Vec<ScheduleEntry>,
    pub total_duration_ps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[default]
    Asap,
    Alap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdleWindow {
    pub qubit: usize,
    pub start_ps: u64,
    pub idle_ps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DdSequence {
    #[default]
    XpXm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdPolicy {
    pub enabled: bool,
    pub min_window_ps: u64,
    pub pulse_duration_ps: u64,
    #[serde(default)]
    pub sequence: DdSequence,
}

impl DdPolicy {
    /// Pulse length = longest single-qubit gate on the device; minimum
    /// window = 2·T_X + 4·dt.
    pub fn for_device(device: &DeviceModel) -> Self {
        let tx = device
            .qubits
            .iter()
            .map(|q| device.to_grid_ps(q.sq_duration_ns))
            .max()
            .unwrap_or(device.dt_ps);
        DdPolicy {
            enabled: true,
            min_window_ps: 2 * tx + 4 * device.dt_ps,
            pulse_duration_ps: tx,
            sequence: DdSequence::XpXm,
        }
    }

    pub fn disabled(device: &DeviceModel) -> Self {
        DdPolicy { enabled: false, ..DdPolicy::for_device(device) }
    }

    pub fn check(&self) -> Result<()> {
        if self.min_window_ps < 2 * self.pulse_duration_ps {
            return Err(QvfError::invariant(
                "dd policy",
                format!("min_window {} < 2·T_X {}", self.min_window_ps, 2 * self.pulse_duration_ps),
            ));
        }
        Ok(())
    }
}

pub fn schedule_asap(c: &Circuit, device: &DeviceModel) -> Result<Schedule> {
    schedule(c, device, Alignment::Asap)
}

/// Schedules `c`. Measurements are deferred and start together once every
/// qubit is free.
pub fn schedule(c: &Circuit, device: &DeviceModel, align: Alignment) -> Result<Schedule> {
    if c.width > device.width() {
        return Err(QvfError::InvalidSchedule(format!(
            "circuit width {} exceeds device width {}",
            c.width,
            device.width()
        )));
    }
    let mut body = Vec::new();
    let mut measures = Vec::new();
    let mut measured = vec![false; c.width];
    for g in c.gates() {
        if let GateKind::Measure { .. } = g.kind {
            measured[g.qubits[0]] = true;
            measures.push(g.clone());
        } else {
            if g.qubits.iter().any(|&q| measured[q]) {
                return Err(QvfError::InvalidSchedule(format!("{} after measurement on {:?}", g.name(), g.qubits)));
            }
            body.push(g.clone());
        }
    }
    let mut durations = Vec::with_capacity(body.len());
    for g in &body {
        durations.push(device.duration_ps(g)?);
    }
    let n = body.len();
    let mut starts = vec![0u64; n];
    let mut ready = vec![0u64; c.width];
    let order: Vec<usize> = match align {
        Alignment::Asap => (0..n).collect(),
        Alignment::Alap => (0..n).rev().collect(),
    };
    for &i in &order {
        let t = body[i].qubits.iter().map(|&q| ready[q]).max().unwrap_or(0);
        starts[i] = t;
        for &q in &body[i].qubits {
            ready[q] = t + durations[i];
        }
    }
    let body_end = ready.iter().copied().max().unwrap_or(0);
    if align == Alignment::Alap {
        for i in 0..n {
            starts[i] = body_end - starts[i] - durations[i];
        }
    }
    let mut entries: Vec<ScheduleEntry> = body
        .into_iter()
        .zip(starts)
        .zip(durations)
        .map(|((gate, start_ps), duration_ps)| ScheduleEntry { gate, start_ps, duration_ps })
        .collect();
    // Stable sort keeps program order between equal starts.
    entries.sort_by_key(|e| e.start_ps);
    let md = device.measure_duration_ps();
    for g in measures {
        entries.push(ScheduleEntry { gate: g, start_ps: body_end, duration_ps: md });
    }
    let total = entries.iter().map(|e| e.end_ps()).max().unwrap_or(0);
    let s = Schedule { width: c.width, dt_ps: device.dt_ps, entries, total_duration_ps: total };
    s.validate()?;
    Ok(s)
}

impl Schedule {
    /// No overlaps on a qubit, starts on the grid, sorted starts, total
    /// duration consistent.
    pub fn validate(&self) -> Result<()> {
        let mut busy: Vec<Vec<(u64, u64)>> = vec![Vec::new(); self.width];
        let mut prev = 0;
        for e in &self.entries {
            if e.start_ps < prev {
                return Err(QvfError::InvalidSchedule("entries not sorted by start".into()));
            }
            prev = e.start_ps;
            if e.start_ps % self.dt_ps != 0 {
                return Err(QvfError::InvalidSchedule(format!("start {} off the grid", e.start_ps)));
            }
            if e.duration_ps == 0 {
                continue;
            }
            for &q in &e.gate.qubits {
                if q >= self.width {
                    return Err(QvfError::InvalidSchedule(format!("qubit {} out of range", q)));
                }
                busy[q].push((e.start_ps, e.end_ps()));
            }
        }
        for (q, iv) in busy.iter_mut().enumerate() {
            iv.sort();
            for w in iv.windows(2) {
                if w[1].0 < w[0].1 {
                    return Err(QvfError::InvalidSchedule(format!("overlap on qubit {} at {} ps", q, w[1].0)));
                }
            }
        }
        let total = self.entries.iter().map(|e| e.end_ps()).max().unwrap_or(0);
        if total != self.total_duration_ps {
            return Err(QvfError::InvalidSchedule("total duration mismatch".into()));
        }
        Ok(())
    }

    /// Gates in time order.
    pub fn to_circuit(&self) -> Circuit {
        Circuit::from_gates(self.width, self.entries.iter().map(|e| e.gate.clone()))
    }

    pub fn to_json(&self) -> String {
        let rec = ScheduleRecord {
            width: self.width,
            dt_ps: self.dt_ps,
            total_duration_ps: self.total_duration_ps,
            entries: self
                .entries
                .iter()
                .map(|e| EntryRecord {
                    gate: GateRecord::from_gate(&e.gate),
                    start_ps: e.start_ps,
                    duration_ps: e.duration_ps,
                })
                .collect(),
        };
        serde_json::to_string(&rec).expect("schedule serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: ScheduleRecord = serde_json::from_str(s).map_err(|e| QvfError::Parse(e.to_string()))?;
        let mut entries = Vec::with_capacity(rec.entries.len());
        for e in rec.entries {
            entries.push(ScheduleEntry { gate: e.gate.into_gate()?, start_ps: e.start_ps, duration_ps: e.duration_ps });
        }
        let s = Schedule { width: rec.width, dt_ps: rec.dt_ps, entries, total_duration_ps: rec.total_duration_ps };
        s.validate()?;
        Ok(s)
    }

    /// Per-qubit occupancy rows: `qubit,start_ps,end_ps,gate`.
    pub fn timeline_csv(&self) -> String {
        let mut out = String::from("qubit,start_ps,end_ps,gate\n");
        let mut rows: Vec<(usize, u64, u64, &str)> = Vec::new();
        for e in &self.entries {
            if e.duration_ps == 0 {
                continue;
            }
            for &q in &e.gate.qubits {
                rows.push((q, e.start_ps, e.end_ps(), e.gate.name()));
            }
        }
        rows.sort();
        for (q, s, t, n) in rows {
            let _ = writeln!(out, "{},{},{},{}", q, s, t, n);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleRecord {
    width: usize,
    dt_ps: u64,
    total_duration_ps: u64,
    entries: Vec<EntryRecord>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    #[serde(flatten)]
    gate: GateRecord,
    start_ps: u64,
    duration_ps: u64,
}

/// Maximal gaps between consecutive timed activities of each qubit.
/// Nothing before the first activity or after the last.
pub fn find_idle_windows(s: &Schedule) -> Vec<IdleWindow> {
    let mut busy: Vec<Vec<(u64, u64)>> = vec![Vec::new(); s.width];
    for e in &s.entries {
        if e.duration_ps == 0 {
            continue;
        }
        for &q in &e.gate.qubits {
            busy[q].push((e.start_ps, e.end_ps()));
        }
    }
    let mut out = Vec::new();
    for (q, iv) in busy.iter_mut().enumerate() {
        iv.sort();
        for w in iv.windows(2) {
            if w[1].0 > w[0].1 {
                out.push(IdleWindow { qubit: q, start_ps: w[0].1, idle_ps: w[1].0 - w[0].1 });
            }
        }
    }
    out
}

/// Pulse offsets (Xp, Xm) from the window start for τ/2 − Xp − τ − Xm − τ/2,
/// with τ = (T_idle − 2·T_X)/2. Both τ/2 and τ are rounded down to the grid;
/// the trailing delay takes the remainder.
pub fn dd_offsets(idle_ps: u64, tx_ps: u64, dt_ps: u64) -> (u64, u64) {
    let two_tau = idle_ps - 2 * tx_ps;
    let lead = two_tau / (4 * dt_ps) * dt_ps;
    let mid = two_tau / (2 * dt_ps) * dt_ps;
    (lead, lead + tx_ps + mid)
}

pub fn insert_dd(s: &Schedule, policy: &DdPolicy) -> Result<Schedule> {
    policy.check()?;
    if !policy.enabled {
        return Ok(s.clone());
    }
    let tx = policy.pulse_duration_ps;
    let mut entries = s.entries.clone();
    for w in find_idle_windows(s) {
        if w.idle_ps < policy.min_window_ps {
            continue;
        }
        let (a, b) = dd_offsets(w.idle_ps, tx, s.dt_ps);
        entries.push(ScheduleEntry { gate: Gate::xp(w.qubit), start_ps: w.start_ps + a, duration_ps: tx });
        entries.push(ScheduleEntry { gate: Gate::xm(w.qubit), start_ps: w.start_ps + b, duration_ps: tx });
    }
    entries.sort_by_key(|e| e.start_ps);
    let out = Schedule { entries, ..s.clone() };
    out.validate()?;
    Ok(out)
}

/// Total duration in nanoseconds.
pub fn circuit_duration(s: &Schedule) -> f64 {
    s.total_duration_ps as f64 / 1000.0
}
