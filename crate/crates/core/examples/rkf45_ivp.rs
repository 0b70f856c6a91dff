//! The adaptive RKF45 integrator on its own: a harmonic oscillator over one
//! period, then a single string IVP from a known start state.

use mooring_shoot::integrate::{integrate_span, integrate_string, IntegratorSettings};
use mooring_shoot::model::{buoyant_weight_load, LineProperties, StateVector, Vec3};
use nalgebra::Vector2;

pub fn run() -> mooring_shoot::Result<Vec<(f64, usize, f64)>> {
    let period = 2.0 * std::f64::consts::PI;
    let mut rows = Vec::new();
    println!("{:>8} {:>6} {:>12}", "abs_tol", "steps", "error");
    for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
        let settings = IntegratorSettings::for_length(period).with_abs_tol(tol);
        let samples = integrate_span(
            |_s, y: &Vector2<f64>| Ok(Vector2::new(y[1], -y[0])),
            0.0,
            period,
            Vector2::new(1.0, 0.0),
            &settings,
        )?;
        let (_, end) = samples.last().expect("at least the start sample");
        let err = (end - Vector2::new(1.0, 0.0)).amax();
        println!("{tol:>8.0e} {:>6} {err:>12.3e}", samples.len() - 1);
        rows.push((tol, samples.len() - 1, err));
    }

    // A line leaving the origin at 45 degrees downwards with a 1 kN pull.
    let props = LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0)?;
    let start = StateVector::new(Vec3::zeros(), Vec3::new(1000.0, 0.0, -1000.0) / 2f64.sqrt());
    let traj = integrate_string(
        &props,
        &buoyant_weight_load(&props),
        start,
        &IntegratorSettings::for_length(props.length),
    )?;
    let end = traj.last();
    let (r, n) = (end.position, end.tension);
    println!(
        "string end: r = ({:.4}, {:.4}, {:.4}) m, n = ({:.3}, {:.3}, {:.3}) N, {} samples",
        r.x,
        r.y,
        r.z,
        n.x,
        n.y,
        n.z,
        traj.len()
    );
    Ok(rows)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
