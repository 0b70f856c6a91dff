//! Loads other than uniform weight: a clump weight on part of the line and a
//! side current on the upper half, then a depth-dependent load as a closure.

use std::sync::Arc;

use mooring_shoot::model::{LineProperties, LoadSegment, PiecewiseConstantLoad, Vec3};
use mooring_shoot::shoot::{solve, BoundaryJoint, ShootingProblem};

pub fn run() -> mooring_shoot::Result<(Vec3, Vec3)> {
    let props = LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0)?;
    let w = props.relative_weight();
    let start = BoundaryJoint::Spherical { anchor: Vec3::zeros() };
    let end = BoundaryJoint::Spherical {
        anchor: Vec3::new(30.0, 0.0, 10.0),
    };

    let segments = vec![
        LoadSegment {
            start: 0.0,
            end: 20.0,
            force: [0.0, 0.0, -w],
        },
        LoadSegment {
            start: 20.0,
            end: 25.0,
            force: [0.0, 0.0, -5.0 * w],
        },
        LoadSegment {
            start: 25.0,
            end: 50.0,
            force: [0.0, 0.3 * w, -w],
        },
    ];
    let load = PiecewiseConstantLoad::new(segments)?;
    let problem = ShootingProblem::new(props, Arc::new(load), start.clone(), end.clone());
    let sol = solve(&problem)?;
    let drift = sol.trajectory.iter().map(|(_, st)| st.position.y).fold(0.0, f64::max);
    let n0 = sol.trajectory.first().tension;
    println!(
        "clump + current: {} it, max side drift {drift:.4} m, n(0) = ({:.3}, {:.3}, {:.3}) N",
        sol.newton_iterations, n0.x, n0.y, n0.z
    );

    // Weight fading to zero near the surface, z = 10 m.
    let depth_load = move |_s: f64, r: &Vec3| Vec3::new(0.0, 0.0, -w * (1.0 - r.z / 10.0).clamp(0.0, 1.0));
    let problem = ShootingProblem::new(props, Arc::new(depth_load), start, end);
    let sol = solve(&problem)?;
    let n1 = sol.trajectory.first().tension;
    println!(
        "depth-dependent: {} it, n(0) = ({:.3}, {:.3}, {:.3}) N",
        sol.newton_iterations, n1.x, n1.y, n1.z
    );
    Ok((n0, n1))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
