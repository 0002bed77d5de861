//! Schedules a transpiled circuit and fills its idle windows with DD pulses.

use qvf::model::load_device;
use qvf::qvgen::{generate_qv_circuit, QvSpec};
use qvf::router::{apply_layout, route_bip, RoutingConfig};
use qvf::scheduler::{circuit_duration, find_idle_windows, insert_dd, schedule, Alignment, DdPolicy};

fn main() -> qvf::Result<()> {
    let device = load_device(concat!(env!("CARGO_MANIFEST_DIR"), "/data/montreal_chain.json"))?;
    let cfg = RoutingConfig::default();
    let c = generate_qv_circuit(&QvSpec::new(6, 6, 5)?);
    let phys = apply_layout(&c, &route_bip(&c, &device, &cfg)?, &device, &cfg)?;
    let s = schedule(&phys, &device, Alignment::Alap)?;
    let policy = DdPolicy::for_device(&device);
    let windows = find_idle_windows(&s);
    let long = windows.iter().filter(|w| w.idle_ps >= policy.min_window_ps).count();
    let dd = insert_dd(&s, &policy)?;
    println!("duration {:.1} ns, {} idle windows, {} long enough for DD", circuit_duration(&s), windows.len(), long);
    println!("{} entries before DD, {} after", s.entries.len(), dd.entries.len());
    print!("{}", dd.timeline_csv().lines().take(12).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
