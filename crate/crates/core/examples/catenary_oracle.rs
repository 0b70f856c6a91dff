//! Closed-form elastic catenary for a line held by a ball joint at the origin
//! and a horizontal slider at 25 m pulled with a tenth of the line weight.

use mooring_shoot::catenary::{semi_analytic_solve, CatenaryCase, CatenarySolution, PlanarJoint};
use mooring_shoot::model::{Convention, LineProperties};

pub fn run() -> mooring_shoot::Result<CatenarySolution> {
    let props = LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0)?;
    let case = CatenaryCase::new(
        props,
        Convention::I,
        PlanarJoint::Ball { x: 0.0, z: 0.0 },
        PlanarJoint::Slider {
            fx: props.total_weight() / 10.0,
            z: 0.0,
        },
    );
    let sol = semi_analytic_solve(&case)?;
    let p = sol.params;
    println!(
        "N_x0 = {:.6} N, N_z0 = {:.6} N after {} iterations (residual {:.1e})",
        p.n_x0, p.n_z0, sol.iterations, sol.residual_norm
    );

    // The lowest point is where the vertical tension vanishes.
    let s_low = -p.n_z0 / props.relative_weight();
    let low = sol.at(s_low, &props)?;
    println!(
        "lowest point at s = {s_low:.4} m: x = {:.4} m, z = {:.4} m",
        low.x, low.z
    );

    println!("{:>6} {:>10} {:>10} {:>10} {:>11}", "s", "x", "z", "n_x", "n_z");
    for i in 0..=10 {
        let s = props.length * i as f64 / 10.0;
        let q = sol.at(s, &props)?;
        println!("{s:>6.1} {:>10.5} {:>10.5} {:>10.4} {:>11.4}", q.x, q.z, q.n_x, q.n_z);
    }
    Ok(sol)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
