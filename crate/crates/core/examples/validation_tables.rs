//! Solves the ten reference configurations and prints the three error tables
//! together with Newton iteration counts and timings.

use mooring_shoot::verify::{build_catalog, run_validation, ErrorReport};

pub fn run() -> ErrorReport {
    let report = run_validation(&build_catalog());
    print!("{}", report.render());
    println!();
    for case in &report.cases {
        match &case.outcome {
            Ok(e) => println!(
                "{:<9} newton {:>2} it, |C| {:.1e}, out-of-plane {:.1e}, {:.1} ms",
                case.id.to_string(),
                e.newton_iterations,
                e.residual_norm,
                e.out_of_plane,
                case.runtime.as_secs_f64() * 1e3
            ),
            Err(msg) => println!("{:<9} failed: {msg}", case.id.to_string()),
        }
    }
    report
}

#[allow(dead_code)]
fn main() {
    if !run().passes() {
        std::process::exit(1);
    }
}
