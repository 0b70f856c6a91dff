//! Runs every example and checks what it computes.

#[path = "../examples/boundary_joints.rs"]
mod boundary_joints;
#[path = "../examples/catenary_oracle.rs"]
mod catenary_oracle;
#[path = "../examples/custom_load.rs"]
mod custom_load;
#[path = "../examples/generate_cases.rs"]
mod generate_cases;
#[path = "../examples/hanging_line.rs"]
mod hanging_line;
#[path = "../examples/newton_fd.rs"]
mod newton_fd;
#[path = "../examples/rkf45_ivp.rs"]
mod rkf45_ivp;
#[path = "../examples/tolerance_sweep.rs"]
mod tolerance_sweep;
#[path = "../examples/validation_tables.rs"]
mod validation_tables;

#[test]
fn hanging_line() {
    let sol = hanging_line::run().unwrap();
    let n0 = sol.trajectory.first().tension;
    assert!((n0.x - 120.7941378148692).abs() < 1e-6);
    assert!((n0.z + 526.018208625).abs() < 1e-6);
}

#[test]
fn boundary_joints() {
    let results = boundary_joints::run().unwrap();
    assert_eq!(results.len(), 6);
    let (_, r, _) = &results[0];
    assert!((r - mooring_shoot::model::Vec3::new(20.0, 15.0, -5.0)).amax() <= 1e-8);
    let (_, r, n) = &results[5];
    assert!((r.z + 3.0).abs() <= 1e-8);
    assert!((n.y + 0.02 * 1052.03641725).abs() < 1e-6);
}

#[test]
fn catenary_oracle() {
    let sol = catenary_oracle::run().unwrap();
    assert!((sol.params.n_x0 - 105.20364172500001).abs() < 1e-9);
    // level ends: the lowest point is mid-length
    assert!((sol.params.n_z0 + 526.018208625).abs() < 1e-9);
}

#[test]
fn custom_load() {
    let (clump, depth) = custom_load::run().unwrap();
    assert!(clump.y > 0.0);
    assert_eq!(depth.y, 0.0);
}

#[test]
fn rkf45_ivp() {
    let rows = rkf45_ivp::run().unwrap();
    assert!(rows.windows(2).all(|w| w[1].1 > w[0].1 && w[1].2 < w[0].2));
}

#[test]
fn newton_fd() {
    let report = newton_fd::run().unwrap();
    let expected = nalgebra::Vector3::new(2f64.sqrt(), 2f64.sqrt(), 5f64.sqrt());
    assert!((report.root - expected).amax() < 1e-12);
}

#[test]
fn tolerance_sweep() {
    let rows = tolerance_sweep::run().unwrap();
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn validation_tables() {
    assert!(validation_tables::run().passes());
}

#[test]
fn generate_cases() {
    let dir = tempfile::tempdir().unwrap();
    let written = generate_cases::run(dir.path()).unwrap();
    assert_eq!(written.len(), 10);
    let committed = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("cases");
    for path in written {
        let name = path.file_name().unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            std::fs::read_to_string(committed.join(name)).unwrap(),
            "{name:?}"
        );
    }
}
