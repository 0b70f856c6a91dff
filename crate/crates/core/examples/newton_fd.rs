//! The finite-difference Newton solver on a small nonlinear system:
//! intersection of a sphere, a cylinder and a plane.

use mooring_shoot::shoot::{newton_solve, NewtonReport, NewtonSettings};
use nalgebra::Vector3;

pub fn run() -> mooring_shoot::Result<NewtonReport<3>> {
    let f = |u: &Vector3<f64>| {
        Ok(Vector3::new(
            u.norm_squared() - 9.0,
            u.x * u.x + u.y * u.y - 4.0,
            u.x - u.y,
        ))
    };
    let settings = NewtonSettings::default().with_tol(1e-12);
    let report = newton_solve(f, Vector3::new(1.0, 2.0, 3.0), Vector3::repeat(1.0), &settings)?;
    println!(
        "root {:.15?} after {} iterations",
        report.root.as_slice(),
        report.iterations
    );
    for (k, r) in report.trace.iter().enumerate() {
        println!("  {k:>2}  |C| = {r:.3e}");
    }
    Ok(report)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
