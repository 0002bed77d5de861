//! Stage functions and their on-disk artifacts.
//!
//! Each stage directory holds `manifest.json` plus one JSON file per
//! circuit. Manifests carry the heavy sets forward so any stage can be
//! re-run from the previous stage's directory.

use crate::error::{QvfError, Result};
use crate::model::{select_chain, Circuit, DeviceModel, GateKind};
use crate::qvgen::{circuit_seed, generate_qv_circuit, ideal_heavy_set, ideal_hop, QvSpec};
use crate::rng::derive;
use crate::router::{apply_layout, route_bip, route_heuristic, LayoutSolution, Method, RoutingConfig};
use crate::scheduler::{circuit_duration, insert_dd, schedule, Alignment, DdPolicy, Schedule};
use crate::simkit::{simulate_bound, NoiseModel, ShotCounts};
use crate::stats::{aggregate, cumulative_trace, hop_of_counts, HopStats};
use crate::synth::{fidelity_table, synthesize_with_count, weyl_coordinates, Entangler};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

pub fn read_file(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| QvfError::Io { path: p.display().to_string(), source: e })
}

pub fn write_file(p: &Path, s: &str) -> Result<()> {
    if let Some(d) = p.parent() {
        std::fs::create_dir_all(d).map_err(|e| QvfError::Io { path: d.display().to_string(), source: e })?;
    }
    std::fs::write(p, s).map_err(|e| QvfError::Io { path: p.display().to_string(), source: e })
}

fn parse<T: for<'de> Deserialize<'de>>(p: &Path) -> Result<T> {
    serde_json::from_str(&read_file(p)?).map_err(|e| QvfError::Parse(format!("{}: {e}", p.display())))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitEntry {
    pub index: usize,
    pub seed: u64,
    pub file: String,
    pub heavy: Vec<String>,
    pub ideal_hop: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub width: usize,
    pub depth: usize,
    pub root_seed: u64,
    /// Hardware ids of the qubits the circuits act on, in physical index
    /// order. Absent for model circuits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_qubits: Option<Vec<u32>>,
    pub circuits: Vec<CircuitEntry>,
}

impl StageManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        parse(&dir.join("manifest.json"))
    }

    pub fn circuit(&self, dir: &Path, i: usize) -> Result<Circuit> {
        Circuit::from_json(&read_file(&dir.join(&self.circuits[i].file))?)
    }

    pub fn schedule(&self, dir: &Path, i: usize) -> Result<Schedule> {
        Schedule::from_json(&read_file(&dir.join(&self.circuits[i].file))?)
    }

    /// Device restricted to the manifest's qubits.
    pub fn device(&self, full: &DeviceModel) -> Result<DeviceModel> {
        match &self.device_qubits {
            Some(ids) => full.subdevice(ids),
            None => Err(QvfError::Config(format!("{} manifest has no device qubits", self.stage))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedCircuit {
    pub entry: CircuitEntry,
    pub circuit: Circuit,
}

/// QV circuits with their ideal heavy sets.
pub fn generate(width: usize, depth: usize, count: usize, root: u64) -> Result<Vec<GeneratedCircuit>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = circuit_seed(root, i as u64);
            let c = generate_qv_circuit(&QvSpec::new(width, depth, seed)?);
            Ok(GeneratedCircuit {
                entry: CircuitEntry {
                    index: i,
                    seed,
                    file: format!("qv_{i:04}.json"),
                    heavy: ideal_heavy_set(&c)?,
                    ideal_hop: ideal_hop(&c)?,
                },
                circuit: c,
            })
        })
        .collect()
}

pub fn write_stage(dir: &Path, manifest: &StageManifest, files: &[String]) -> Result<()> {
    for (e, body) in manifest.circuits.iter().zip(files) {
        write_file(&dir.join(&e.file), body)?;
    }
    write_file(&dir.join("manifest.json"), &pretty(manifest))
}

pub fn gen_manifest(width: usize, depth: usize, root: u64, gens: &[GeneratedCircuit]) -> StageManifest {
    StageManifest {
        stage: "gen".into(),
        width,
        depth,
        root_seed: root,
        device_qubits: None,
        circuits: gens.iter().map(|g| g.entry.clone()).collect(),
    }
}

/// Device the circuits are routed on: the whole device when its width
/// matches, otherwise the best chain of `width` qubits.
pub fn target_device(device: &DeviceModel, width: usize) -> Result<DeviceModel> {
    if device.width() == width {
        return Ok(device.clone());
    }
    let ids = select_chain(device, width)?;
    device.subdevice(&ids)
}

#[derive(Clone, Debug)]
pub struct Transpiled {
    pub index: usize,
    pub circuit: Circuit,
    pub solution: LayoutSolution,
    pub entanglers: usize,
    pub sq_pulses: usize,
    pub solve_ms: f64,
}

/// Per-circuit heuristic seed.
pub fn routing_config_for(cfg: &RoutingConfig, root: u64, index: usize) -> RoutingConfig {
    RoutingConfig { seed: derive(root ^ cfg.seed, "route-heuristic", &[index as u64]), ..cfg.clone() }
}

pub fn transpile_one(c: &Circuit, index: usize, device: &DeviceModel, cfg: &RoutingConfig, method: Method, root: u64) -> Result<Transpiled> {
    let cfg = routing_config_for(cfg, root, index);
    let t = Instant::now();
    let sol = match method {
        Method::Bip => route_bip(c, device, &cfg)?,
        Method::Heuristic => route_heuristic(c, device, &cfg)?,
    };
    let solve_ms = t.elapsed().as_secs_f64() * 1e3;
    let phys = apply_layout(c, &sol, device, &cfg)?;
    Ok(Transpiled {
        index,
        entanglers: phys.entangler_count(),
        sq_pulses: phys.sx_count(),
        circuit: phys,
        solution: sol,
        solve_ms,
    })
}

pub fn transpile_all(circuits: &[(usize, Circuit)], device: &DeviceModel, cfg: &RoutingConfig, method: Method, root: u64) -> Result<Vec<Transpiled>> {
    circuits.par_iter().map(|(i, c)| transpile_one(c, *i, device, cfg, method, root)).collect()
}

pub fn routing_csv(ts: &[Transpiled]) -> String {
    let mut s = String::from("index,method,swaps,mirrored,entanglers,sq_pulses,cost,optimal,h,solve_ms\n");
    for t in ts {
        let m = match t.solution.method {
            Method::Bip => "bip",
            Method::Heuristic => "heuristic",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.12},{},{},{:.3}",
            t.index,
            m,
            t.solution.swap_count(),
            t.solution.mirrored().count(),
            t.entanglers,
            t.sq_pulses,
            t.solution.cost(),
            t.solution.optimal,
            t.solution.h,
            t.solve_ms
        );
    }
    s
}

/// Per-gate synthesis rows: Weyl coordinates, f_avg for 0..3 entanglers,
/// the chosen count under `fb` and its pulse counts.
pub fn synth_report_csv(circuits: &[(usize, Circuit)], fb: f64, e: Entangler) -> Result<String> {
    let mut s = String::from("circuit,layer,gate,c1,c2,c3,f0,f1,f2,f3,chosen,sq_pulses,outer_pulses\n");
    for (i, c) in circuits {
        for (t, layer) in c.layers.iter().enumerate() {
            for (j, g) in layer.iter().enumerate() {
                let GateKind::Su4(u) = &g.kind else { continue };
                let w = weyl_coordinates(u)?;
                let table = fidelity_table(&w);
                let (k, _) = table.best(fb);
                let d = synthesize_with_count(u, k, e, true);
                let _ = writeln!(
                    s,
                    "{i},{t},{j},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{k},{},{}",
                    w.c1, w.c2, w.c3, table.f_avg[0], table.f_avg[1], table.f_avg[2], table.f_avg[3], d.sq_pulse_count, d.outer_pulse_count
                );
            }
        }
    }
    Ok(s)
}

pub fn schedule_one(c: &Circuit, device: &DeviceModel, dd: bool, align: Alignment) -> Result<Schedule> {
    let s = schedule(c, device, align)?;
    if dd {
        insert_dd(&s, &DdPolicy::for_device(device))
    } else {
        Ok(s)
    }
}

pub fn schedule_all(circuits: &[Circuit], device: &DeviceModel, dd: bool, align: Alignment) -> Result<Vec<Schedule>> {
    circuits.par_iter().map(|c| schedule_one(c, device, dd, align)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitResult {
    pub index: usize,
    pub hop: f64,
    pub duration_ns: f64,
    pub counts: ShotCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResults {
    pub shots: u64,
    pub root_seed: u64,
    pub circuits: Vec<CircuitResult>,
}

/// Per-circuit simulation seed.
pub fn sim_seed(root: u64, index: usize) -> u64 {
    derive(root, "sim", &[index as u64])
}

pub fn simulate_all(
    schedules: &[Schedule],
    entries: &[CircuitEntry],
    device: &DeviceModel,
    noise: &NoiseModel,
    shots: u64,
    root: u64,
) -> Result<SimulationResults> {
    let bound = noise.bind(device)?;
    let circuits = schedules
        .par_iter()
        .zip(entries)
        .map(|(s, e)| {
            let counts = simulate_bound(s, &bound, shots, sim_seed(root, e.index))?;
            let heavy: BTreeSet<String> = e.heavy.iter().cloned().collect();
            Ok(CircuitResult { index: e.index, hop: hop_of_counts(&counts, &heavy)?, duration_ns: circuit_duration(s), counts })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationResults { shots, root_seed: root, circuits })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopEntry {
    pub index: usize,
    pub hop: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub stats: HopStats,
    pub hops: Vec<HopEntry>,
}

pub fn report(results: &SimulationResults) -> Result<(Report, String)> {
    let h: Vec<f64> = results.circuits.iter().map(|c| c.hop).collect();
    let stats = aggregate(&h)?;
    let trace = crate::stats::trace_csv(&cumulative_trace(&h)?);
    let hops = results.circuits.iter().map(|c| HopEntry { index: c.index, hop: c.hop }).collect();
    Ok((Report { stats, hops }, trace))
}

pub fn write_json<T: Serialize>(p: &Path, v: &T) -> Result<()> {
    write_file(p, &pretty(v))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(p: &Path) -> Result<T> {
    parse(p)
}
