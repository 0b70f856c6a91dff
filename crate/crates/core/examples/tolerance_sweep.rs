//! How the along-line error of the symmetric ball-to-ball case follows the
//! RKF45 tolerance.

use mooring_shoot::catenary::semi_analytic_solve;
use mooring_shoot::shoot::solve;
use mooring_shoot::verify::{build_case, dimensionless_errors, CatalogSettings};

pub fn run() -> mooring_shoot::Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    println!("{:>8} {:>8} {:>12}", "rkf45", "samples", "max error");
    for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
        let settings = CatalogSettings {
            rkf45_tol: tol,
            ..CatalogSettings::default()
        };
        let case = build_case("I-a".parse()?, &settings);
        let reference = semi_analytic_solve(&case.reference)?;
        let shot = solve(&case.problem)?;
        let errors = dimensionless_errors(&shot.trajectory, &reference.params, &case.problem.props)?;
        let worst = errors.iter().copied().fold(0.0, f64::max);
        println!("{tol:>8.0e} {:>8} {worst:>12.3e}", shot.trajectory.len());
        rows.push((tol, worst));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
