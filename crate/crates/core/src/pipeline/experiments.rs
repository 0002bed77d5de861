//! Stage runners over directories, the end-to-end QV run and the two A/B
//! comparisons.

use super::stages::*;
use super::{ExperimentConfig, VERSION};
use crate::error::{QvfError, Result};
use crate::model::{Circuit, DeviceModel, GateKind, VariantName};
use crate::router::{Method, RoutingConfig};
use crate::scheduler::{schedule, Alignment, Schedule};
use crate::simkit::NoiseModel;
use crate::synth::Entangler;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        QvfError::Config(_) | QvfError::Stage { .. } => e,
        e => e.in_stage(name),
    })
}

/// Writes generated circuits to `out`.
pub fn stage_gen(cfg: &ExperimentConfig, out: &Path) -> Result<StageManifest> {
    stage("gen", (|| {
        let q = &cfg.qv;
        let gens = generate(q.width, q.depth, q.count, q.seed)?;
        let m = gen_manifest(q.width, q.depth, q.seed, &gens);
        let files: Vec<String> = gens.iter().map(|g| g.circuit.to_json()).collect();
        write_stage(out, &m, &files)?;
        Ok(m)
    })())
}

fn load_circuits(m: &StageManifest, dir: &Path) -> Result<Vec<(usize, Circuit)>> {
    (0..m.circuits.len()).map(|i| Ok((m.circuits[i].index, m.circuit(dir, i)?))).collect()
}

/// Routes and lowers the circuits in `input` onto the target device.
/// Writes `routing.csv` next to the circuits and, if asked, a per-gate
/// synthesis CSV.
pub fn stage_transpile(cfg: &ExperimentConfig, input: &Path, out: &Path, synth_csv: Option<&Path>) -> Result<StageManifest> {
    let full = cfg.device_model()?;
    stage("transpile", (|| {
        let m = StageManifest::load(input)?;
        let target = target_device(&full, m.width)?;
        let circuits = load_circuits(&m, input)?;
        let ts = transpile_all(&circuits, &target, &cfg.routing, cfg.method, m.root_seed)?;
        let ids: Vec<u32> = (0..target.width()).map(|p| target.id(p)).collect();
        let manifest = StageManifest { stage: "transpile".into(), device_qubits: Some(ids), ..m };
        let files: Vec<String> = ts.iter().map(|t| t.circuit.to_json()).collect();
        write_stage(out, &manifest, &files)?;
        write_file(&out.join("routing.csv"), &routing_csv(&ts))?;
        if let Some(p) = synth_csv {
            write_file(p, &synth_report_csv(&circuits, cfg.routing.fb, cfg.routing.entangler)?)?;
        }
        Ok(manifest)
    })())
}

/// Schedules physical circuits, inserting DD when `cfg.dd`. With
/// `timeline_dir` set, one occupancy CSV per circuit is written there.
pub fn stage_schedule(cfg: &ExperimentConfig, input: &Path, out: &Path, timeline_dir: Option<&Path>) -> Result<StageManifest> {
    let full = cfg.device_model()?;
    stage("schedule", (|| {
        let m = StageManifest::load(input)?;
        let device = m.device(&full)?;
        let circuits: Vec<Circuit> = load_circuits(&m, input)?.into_iter().map(|(_, c)| c).collect();
        let schedules = schedule_all(&circuits, &device, cfg.dd, cfg.alignment)?;
        let manifest = StageManifest { stage: "schedule".into(), ..m };
        let files: Vec<String> = schedules.iter().map(|s| s.to_json()).collect();
        write_stage(out, &manifest, &files)?;
        if let Some(d) = timeline_dir {
            for (e, s) in manifest.circuits.iter().zip(&schedules) {
                write_file(&d.join(format!("timeline_{:04}.csv", e.index)), &s.timeline_csv())?;
            }
        }
        Ok(manifest)
    })())
}

/// Simulates scheduled circuits and writes per-circuit counts and HOPs.
pub fn stage_simulate(cfg: &ExperimentConfig, input: &Path, results: &Path) -> Result<SimulationResults> {
    let full = cfg.device_model()?;
    let noise = cfg.noise_model(&full)?;
    stage("simulate", (|| {
        let m = StageManifest::load(input)?;
        let device = m.device(&full)?;
        let schedules = (0..m.circuits.len()).map(|i| m.schedule(input, i)).collect::<Result<Vec<Schedule>>>()?;
        let r = simulate_all(&schedules, &m.circuits, &device, &noise, cfg.shots, cfg.seed)?;
        write_json(results, &r)?;
        Ok(r)
    })())
}

pub fn stage_report(results: &Path, out: &Path, trace_csv: Option<&Path>) -> Result<Report> {
    stage("report", (|| {
        let r: SimulationResults = read_json(results)?;
        let (rep, trace) = report(&r)?;
        write_json(out, &rep)?;
        if let Some(p) = trace_csv {
            write_file(p, &trace)?;
        }
        Ok(rep)
    })())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub qv_seed: u64,
    pub sim_seed: u64,
    pub device_qubits: Vec<u32>,
    pub circuit_seeds: Vec<u64>,
    pub sim_seeds: Vec<u64>,
}

#[derive(Serialize)]
struct Metadata {
    started_unix_s: f64,
    finished_unix_s: f64,
    stage_seconds: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug)]
pub struct QvOutcome {
    pub report: Report,
    pub out: PathBuf,
}

impl QvOutcome {
    pub fn passed(&self) -> bool {
        self.report.stats.passed
    }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// gen → transpile → schedule → simulate → report under `cfg.out`.
///
/// `report.json` and `manifest.json` depend only on the config; wall-clock
/// data goes to `metadata.json`.
pub fn run_qv(cfg: &ExperimentConfig) -> Result<QvOutcome> {
    cfg.check()?;
    let o = &cfg.out;
    let started = now();
    let mut times = Vec::new();
    let mut lap = |name: &'static str, t: &mut f64| {
        let n = now();
        times.push((name, n - *t));
        *t = n;
    };
    let mut t = started;
    let gen = stage_gen(cfg, &o.join("gen"))?;
    lap("gen", &mut t);
    let tr = stage_transpile(cfg, &o.join("gen"), &o.join("transpile"), None)?;
    lap("transpile", &mut t);
    stage_schedule(cfg, &o.join("transpile"), &o.join("schedule"), None)?;
    lap("schedule", &mut t);
    stage_simulate(cfg, &o.join("schedule"), &o.join("results.json"))?;
    lap("simulate", &mut t);
    let rep = stage_report(&o.join("results.json"), &o.join("report.json"), Some(&o.join("trace.csv")))?;
    lap("report", &mut t);

    let manifest = RunManifest {
        version: VERSION.into(),
        config_hash: cfg.hash(),
        config: ExperimentConfig { out: PathBuf::new(), ..cfg.clone() },
        qv_seed: cfg.qv.seed,
        sim_seed: cfg.seed,
        device_qubits: tr.device_qubits.clone().unwrap_or_default(),
        circuit_seeds: gen.circuits.iter().map(|e| e.seed).collect(),
        sim_seeds: gen.circuits.iter().map(|e| sim_seed(cfg.seed, e.index)).collect(),
    };
    write_json(&o.join("manifest.json"), &manifest)?;
    write_json(&o.join("metadata.json"), &Metadata { started_unix_s: started, finished_unix_s: now(), stage_seconds: times })?;
    Ok(QvOutcome { report: rep, out: o.clone() })
}

/// Generated and transpiled circuits on the target device, kept in memory.
struct Prepared {
    entries: Vec<CircuitEntry>,
    model: Vec<(usize, Circuit)>,
    device: DeviceModel,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.check()?;
    let full = cfg.device_model()?;
    let q = &cfg.qv;
    let gens = stage("gen", generate(q.width, q.depth, q.count, q.seed))?;
    let device = stage("transpile", target_device(&full, q.width))?;
    Ok(Prepared {
        entries: gens.iter().map(|g| g.entry.clone()).collect(),
        model: gens.into_iter().map(|g| (g.entry.index, g.circuit)).collect(),
        device,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdPair {
    pub index: usize,
    pub hop_idle: f64,
    pub hop_dd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdAbReport {
    pub n: usize,
    /// Share of circuits with hop_dd strictly above hop_idle.
    pub fraction_improved: f64,
    pub mean_increase: f64,
    /// Standard error of the mean paired difference.
    pub std_error: f64,
    pub pairs: Vec<DdPair>,
}

impl DdAbReport {
    pub fn from_pairs(pairs: Vec<DdPair>) -> Self {
        let n = pairs.len();
        let d: Vec<f64> = pairs.iter().map(|p| p.hop_dd - p.hop_idle).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        DdAbReport {
            n,
            fraction_improved: d.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64,
            mean_increase: mean,
            std_error: (var / n as f64).sqrt(),
            pairs,
        }
    }
}

/// Same circuits, seeds and noise, simulated with and without DD.
pub fn run_dd_ab(cfg: &ExperimentConfig) -> Result<DdAbReport> {
    run_dd_ab_with(cfg, None)
}

/// As [`run_dd_ab`] with an explicit noise model bound to the device ids.
pub fn run_dd_ab_with(cfg: &ExperimentConfig, noise: Option<&NoiseModel>) -> Result<DdAbReport> {
    let p = prepare(cfg)?;
    let noise = match noise {
        Some(n) => n.clone(),
        None => cfg.noise_model(&cfg.device_model()?)?,
    };
    let ts = stage("transpile", transpile_all(&p.model, &p.device, &cfg.routing, cfg.method, cfg.qv.seed))?;
    let phys: Vec<Circuit> = ts.into_iter().map(|t| t.circuit).collect();
    let idle = stage("schedule", schedule_all(&phys, &p.device, false, cfg.alignment))?;
    let dd = stage("schedule", schedule_all(&phys, &p.device, true, cfg.alignment))?;
    let a = stage("simulate", simulate_all(&idle, &p.entries, &p.device, &noise, cfg.shots, cfg.seed))?;
    let b = stage("simulate", simulate_all(&dd, &p.entries, &p.device, &noise, cfg.shots, cfg.seed))?;
    let pairs = a
        .circuits
        .iter()
        .zip(&b.circuits)
        .map(|(x, y)| DdPair { index: x.index, hop_idle: x.hop, hop_dd: y.hop })
        .collect();
    Ok(DdAbReport::from_pairs(pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterAbRow {
    pub index: usize,
    pub bip_entanglers: usize,
    pub heuristic_entanglers: usize,
    pub bip_sq: usize,
    pub heuristic_sq: usize,
    pub bip_log_cost: f64,
    pub heuristic_log_cost: f64,
    pub bip_duration_ns: f64,
    pub heuristic_duration_ns: f64,
    /// BIP routing lowered to ECR on the device.
    pub ecr_duration_ns: f64,
    /// BIP routing lowered to CX realized as echoed CX.
    pub echoed_cx_duration_ns: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Distribution {
    fn of(v: impl Iterator<Item = f64> + Clone) -> Self {
        let n = v.clone().count() as f64;
        Distribution {
            mean: v.clone().sum::<f64>() / n,
            min: v.clone().fold(f64::INFINITY, f64::min),
            max: v.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterAbReport {
    pub n: usize,
    pub bip_entanglers: Distribution,
    pub heuristic_entanglers: Distribution,
    pub bip_sq: Distribution,
    pub heuristic_sq: Distribution,
    pub bip_duration_ns: Distribution,
    pub heuristic_duration_ns: Distribution,
    /// Share of circuits where the BIP cost is at least the heuristic's.
    pub bip_dominates: f64,
    /// 1 − mean(ECR duration)/mean(echoed-CX duration).
    pub ecr_duration_reduction: f64,
    pub rows: Vec<RouterAbRow>,
}

/// Time until the last gate before readout, in nanoseconds.
pub fn gate_duration_ns(s: &Schedule) -> f64 {
    s.entries
        .iter()
        .filter(|e| !matches!(e.gate.kind, GateKind::Measure { .. }))
        .map(|e| e.end_ps())
        .max()
        .unwrap_or(0) as f64
        / 1000.0
}

/// The same circuits routed by the exact solver and the heuristic, plus the
/// exact routing lowered once to ECR and once to echoed CX.
pub fn run_router_ab(cfg: &ExperimentConfig) -> Result<RouterAbReport> {
    let p = prepare(cfg)?;
    let echoed = stage("transpile", p.device.without_variant(VariantName::DirectCx))?;
    let root = cfg.qv.seed;
    let lower = |c: &Circuit, i: usize, dev: &DeviceModel, rc: &RoutingConfig, m: Method| -> Result<(Transpiled, f64)> {
        let t = stage("transpile", transpile_one(c, i, dev, rc, m, root))?;
        let s = stage("schedule", schedule(&t.circuit, dev, Alignment::Asap))?;
        Ok((t, gate_duration_ns(&s)))
    };
    let ecr_cfg = RoutingConfig { entangler: Entangler::Ecr, ..cfg.routing.clone() };
    let cx_cfg = RoutingConfig { entangler: Entangler::Cx, ..cfg.routing.clone() };
    let rows = p
        .model
        .par_iter()
        .map(|(i, c)| {
            let (b, bd) = lower(c, *i, &p.device, &cfg.routing, Method::Bip)?;
            let (h, hd) = lower(c, *i, &p.device, &cfg.routing, Method::Heuristic)?;
            let (_, ed) = lower(c, *i, &echoed, &ecr_cfg, Method::Bip)?;
            let (_, cd) = lower(c, *i, &echoed, &cx_cfg, Method::Bip)?;
            Ok(RouterAbRow {
                index: *i,
                bip_entanglers: b.entanglers,
                heuristic_entanglers: h.entanglers,
                bip_sq: b.sq_pulses,
                heuristic_sq: h.sq_pulses,
                bip_log_cost: b.solution.log_cost,
                heuristic_log_cost: h.solution.log_cost,
                bip_duration_ns: bd,
                heuristic_duration_ns: hd,
                ecr_duration_ns: ed,
                echoed_cx_duration_ns: cd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let d = |f: fn(&RouterAbRow) -> f64| Distribution::of(rows.iter().map(f));
    let ecr = d(|r| r.ecr_duration_ns).mean;
    let cx = d(|r| r.echoed_cx_duration_ns).mean;
    Ok(RouterAbReport {
        n,
        bip_entanglers: d(|r| r.bip_entanglers as f64),
        heuristic_entanglers: d(|r| r.heuristic_entanglers as f64),
        bip_sq: d(|r| r.bip_sq as f64),
        heuristic_sq: d(|r| r.heuristic_sq as f64),
        bip_duration_ns: d(|r| r.bip_duration_ns),
        heuristic_duration_ns: d(|r| r.heuristic_duration_ns),
        bip_dominates: rows.iter().filter(|r| r.bip_log_cost >= r.heuristic_log_cost - 1e-9).count() as f64 / n as f64,
        ecr_duration_reduction: 1.0 - ecr / cx,
        rows,
    })
}
