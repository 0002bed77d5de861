//! Builds the 0-1 routing model explicitly and checks the solver's answer
//! against it.

use qvf::model::DeviceModel;
use qvf::qvgen::{generate_qv_circuit, QvSpec};
use qvf::router::{build_bip, solve_bip, RoutingConfig, VarKind};

fn main() -> qvf::Result<()> {
    let device = DeviceModel::line(4)?;
    let c = generate_qv_circuit(&QvSpec::new(4, 3, 9)?);
    let model = build_bip(&c, &device, &RoutingConfig::default())?;
    let count = |f: fn(&VarKind) -> bool| model.vars.iter().filter(|v| f(v)).count();
    println!(
        "{} variables (x {}, g {}, y {}, w {}), {} constraints",
        model.vars.len(),
        count(|v| matches!(v, VarKind::X { .. })),
        count(|v| matches!(v, VarKind::G { .. })),
        count(|v| matches!(v, VarKind::Y { .. })),
        count(|v| matches!(v, VarKind::W { .. })),
        model.constraints.len()
    );
    let sol = solve_bip(&model, 10.0)?;
    let x = model.encode(&sol)?;
    model.check(&x)?;
    println!("objective {:.6} = solution log cost {:.6}", model.evaluate(&x), sol.log_cost);
    Ok(())
}
