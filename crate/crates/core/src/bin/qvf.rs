use clap::{Args, Parser, Subcommand};
use qvf::pipeline::{self, ExperimentConfig};
use qvf::QvfError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qvf", version, about = "Quantum-volume transpile, schedule and simulate toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config JSON. Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. `--set qv.count=100`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate QV circuits and their heavy sets.
    Gen {
        #[arg(long)]
        out: PathBuf,
    },
    /// Route and lower circuits onto the device.
    Transpile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-gate Weyl coordinates and fidelity table CSV.
        #[arg(long)]
        synth_report: Option<PathBuf>,
    },
    /// Schedule physical circuits, inserting DD unless `dd=false`.
    Schedule {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory for per-circuit qubit timelines.
        #[arg(long)]
        timeline_dir: Option<PathBuf>,
    },
    /// Noisy simulation of scheduled circuits.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// HOP statistics and the pass decision.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// All stages end to end.
    Qv {
        /// Output directory; overrides the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired HOPs with and without dynamical decoupling.
    DdAb {
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact solver vs heuristic routing, and ECR vs CX lowering.
    RouterAb {
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(c: &Common) -> Result<ExperimentConfig, QvfError> {
    let base = match &c.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| QvfError::Config(e.to_string()))?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.with_overrides(&c.sets)?;
    cfg.check()?;
    cfg.device_model().map_err(|e| QvfError::Config(format!("device: {e}")))?;
    Ok(cfg)
}

fn exit_code(e: &QvfError) -> u8 {
    match e {
        QvfError::Config(_) | QvfError::Invariant { .. } | QvfError::Parse(_) => 2,
        _ => 3,
    }
}

fn summary(s: &qvf::stats::HopStats) {
    println!(
        "n_c={} h_mean={:.4} 2sigma={:.4} z={:.3} confidence={:.3}% {}",
        s.n_c,
        s.h_mean,
        2.0 * s.sigma,
        s.z,
        s.confidence,
        if s.passed { "PASS" } else { "FAIL" }
    );
}

fn run(cli: Cli) -> Result<u8, QvfError> {
    let cfg = load_config(&cli.common)?;
    pipeline::with_thread_pool(|| -> Result<u8, QvfError> {
        match cli.cmd {
            Cmd::Gen { out } => {
                let m = pipeline::stage_gen(&cfg, &out)?;
                println!("{} circuits written to {}", m.circuits.len(), out.display());
            }
            Cmd::Transpile { input, out, synth_report } => {
                let m = pipeline::stage_transpile(&cfg, &input, &out, synth_report.as_deref())?;
                println!("{} circuits transpiled to {}", m.circuits.len(), out.display());
            }
            Cmd::Schedule { input, out, timeline_dir } => {
                let m = pipeline::stage_schedule(&cfg, &input, &out, timeline_dir.as_deref())?;
                println!("{} circuits scheduled to {}", m.circuits.len(), out.display());
            }
            Cmd::Simulate { input, out } => {
                let r = pipeline::stage_simulate(&cfg, &input, &out)?;
                println!("{} circuits simulated to {}", r.circuits.len(), out.display());
            }
            Cmd::Report { results, out, trace_csv } => {
                let r = pipeline::stage_report(&results, &out, trace_csv.as_deref())?;
                summary(&r.stats);
                return Ok(if r.stats.passed { 0 } else { 4 });
            }
            Cmd::Qv { out } => {
                let cfg = match out {
                    Some(o) => ExperimentConfig { out: o, ..cfg.clone() },
                    None => cfg.clone(),
                };
                let o = pipeline::run_qv(&cfg)?;
                summary(&o.report.stats);
                return Ok(if o.passed() { 0 } else { 4 });
            }
            Cmd::DdAb { out } => {
                let r = pipeline::run_dd_ab(&cfg)?;
                pipeline::write_json(&out, &r)?;
                println!(
                    "n={} improved={:.1}% mean_increase={:.4} (se {:.4})",
                    r.n,
                    100.0 * r.fraction_improved,
                    r.mean_increase,
                    r.std_error
                );
            }
            Cmd::RouterAb { out } => {
                let r = pipeline::run_router_ab(&cfg)?;
                pipeline::write_json(&out, &r)?;
                println!(
                    "n={} entanglers bip {:.2}/{} heuristic {:.2}/{} (mean/max), ecr duration reduction {:.1}%",
                    r.n,
                    r.bip_entanglers.mean,
                    r.bip_entanglers.max,
                    r.heuristic_entanglers.mean,
                    r.heuristic_entanglers.max,
                    100.0 * r.ecr_duration_reduction
                );
            }
        }
        Ok(0)
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("qvf: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
