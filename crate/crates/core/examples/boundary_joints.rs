//! One line, six ways to hold its far end: every joint type at `s = L`,
//! including out-of-plane ones that make the solution fully 3D.

use std::sync::Arc;

use mooring_shoot::model::{buoyant_weight_load, LineProperties, Vec3};
use mooring_shoot::shoot::{solve, BoundaryJoint, ShootingProblem};

pub fn run() -> mooring_shoot::Result<Vec<(String, Vec3, Vec3)>> {
    let props = LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0)?;
    let w = props.total_weight();
    let ends = [
        (
            "spherical",
            BoundaryJoint::Spherical {
                anchor: Vec3::new(20.0, 15.0, -5.0),
            },
        ),
        (
            "imposed force",
            BoundaryJoint::ImposedForce {
                force: Vec3::new(0.1 * w, 0.05 * w, 0.2 * w),
            },
        ),
        (
            "spring",
            BoundaryJoint::Spring {
                stiffness: 1e4,
                ref_point: Vec3::new(25.0, 10.0, 0.0),
            },
        ),
        (
            "slider",
            BoundaryJoint::LinearAnnular {
                axis: Vec3::x(),
                axial_force: 0.1 * w,
                transverse_position: [5.0, 0.0],
            },
        ),
        (
            "spring slider",
            BoundaryJoint::SpringLinearAnnular {
                axis: Vec3::y(),
                stiffness: 1e4,
                ref_point: Vec3::new(0.0, 25.0, 0.0),
                transverse_position: [10.0, -2.0],
            },
        ),
        (
            "plane contact",
            BoundaryJoint::Punctual {
                normal: Vec3::z(),
                normal_position: -3.0,
                in_plane_force: [0.1 * w, -0.02 * w],
            },
        ),
    ];

    let mut results = Vec::new();
    for (name, end) in ends {
        let problem = ShootingProblem::new(
            props,
            Arc::new(buoyant_weight_load(&props)),
            BoundaryJoint::Spherical { anchor: Vec3::zeros() },
            end,
        );
        let sol = solve(&problem)?;
        let last = sol.trajectory.last();
        println!(
            "{name:<14} {:>2} it  r(L) = ({:8.4}, {:8.4}, {:8.4})  n(L) = ({:9.3}, {:9.3}, {:9.3})",
            sol.newton_iterations,
            last.position.x,
            last.position.y,
            last.position.z,
            last.tension.x,
            last.tension.y,
            last.tension.z,
        );
        results.push((name.to_string(), last.position, last.tension));
    }
    Ok(results)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
