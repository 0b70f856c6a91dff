//! A 50 m steel chain hung between two anchors 25 m apart, solved by shooting.

use std::sync::Arc;

use mooring_shoot::cli::format_profile;
use mooring_shoot::model::{buoyant_weight_load, LineProperties, Vec3};
use mooring_shoot::shoot::{solve, BoundaryJoint, ShootingProblem, ShootingSolution};

pub fn run() -> mooring_shoot::Result<ShootingSolution> {
    let props = LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0)?;
    let problem = ShootingProblem::new(
        props,
        Arc::new(buoyant_weight_load(&props)),
        BoundaryJoint::Spherical { anchor: Vec3::zeros() },
        BoundaryJoint::Spherical {
            anchor: Vec3::new(25.0, 0.0, 0.0),
        },
    );
    let sol = solve(&problem)?;

    let n0 = sol.trajectory.first().tension;
    let lowest = sol
        .trajectory
        .iter()
        .map(|(_, st)| st.position.z)
        .fold(f64::INFINITY, f64::min);
    println!("weight in water  {:.3} N", props.total_weight());
    println!(
        "Newton           {} iterations, residual {:.2e}",
        sol.newton_iterations, sol.residual_norm
    );
    println!("start tension    ({:.4}, {:.4}, {:.4}) N", n0.x, n0.y, n0.z);
    println!("sag              {:.4} m", -lowest);
    println!("samples          {}", sol.trajectory.len());

    let every_tenth: Vec<_> = sol.trajectory.iter().step_by(10).map(|(s, st)| (*s, st)).collect();
    print!("{}", format_profile(every_tenth));
    Ok(sol)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
