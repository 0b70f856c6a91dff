use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mooring_shoot::catenary::semi_analytic_solve;
use mooring_shoot::cli::{parse_profile, CaseFile, PROFILE_HEADER};
use mooring_shoot::model::Convention;
use mooring_shoot::verify::{build_catalog, point_errors};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mooring-shoot"))
}

fn case_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("cases").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn solve_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    let o = run(&["solve", path_str(&case_path("i_a.toml")), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("converged"));

    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some(PROFILE_HEADER));
    let rows = parse_profile(&text).unwrap();
    assert_eq!(rows.first().unwrap().0, 0.0);
    assert_eq!(rows.last().unwrap().0, 50.0);
}

#[test]
fn solve_to_stdout() {
    let o = run(&["solve", path_str(&case_path("ii_b.toml"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.starts_with(PROFILE_HEADER));
    assert!(stderr(&o).contains("converged"));
}

#[test]
fn misspelled_key_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(case_path("i_a.toml"))
        .unwrap()
        .replace("length =", "lenght =");
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, text).unwrap();
    let o = run(&["solve", path_str(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lenght"), "{}", stderr(&o));
}

#[test]
fn absurd_guess_fails_to_converge() {
    let o = run(&["solve", path_str(&case_path("i_a.toml")), "--guess-c", "1e9"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("no convergence") && err.contains("trace"), "{err}");
}

#[test]
fn io_errors() {
    let o = run(&["solve", "/nonexistent/case.toml"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&[
        "solve",
        path_str(&case_path("i_a.toml")),
        "--out",
        "/nonexistent/dir/p.csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bad_arguments() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["oracle", path_str(&case_path("i_a.toml")), "--samples", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_profile() {
    let o = run(&["oracle", path_str(&case_path("i_a.toml")), "--samples", "101"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_profile(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 101);

    let (s0, first) = rows[0];
    assert_eq!(s0, 0.0);
    assert_eq!((first.position.x, first.position.y, first.position.z), (0.0, 0.0, 0.0));
    assert!((first.tension.x - 120.7941378148692).abs() < 1e-9);
    assert_eq!(first.tension.y, 0.0);
    assert!((first.tension.z + 1052.03641725 / 2.0).abs() < 1e-9);
    assert_eq!(rows[100].0, 50.0);

    // Lowest sample sits where the vertical tension changes sign.
    let low = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.position.z.total_cmp(&b.1 .1.position.z))
        .unwrap()
        .0;
    let nz = |i: usize| rows[i].1.tension.z;
    assert!(nz(low).abs() <= nz(low - 1).abs().max(nz(low + 1).abs()));
    assert!(nz(low - 1) < 0.0 && nz(low + 1) > 0.0);
}

#[test]
fn oracle_and_solve_agree() {
    for name in ["i_a.toml", "ii_d.toml"] {
        let o = run(&["solve", path_str(&case_path(name))]);
        assert_eq!(o.status.code(), Some(0));
        let rows = parse_profile(&String::from_utf8(o.stdout).unwrap()).unwrap();

        let file = CaseFile::parse(&std::fs::read_to_string(case_path(name)).unwrap()).unwrap();
        let reference = semi_analytic_solve(&file.to_catenary(file.convention.unwrap()).unwrap()).unwrap();
        for (s, st) in &rows {
            let exact = reference.at(*s, &file.properties).unwrap();
            let e = point_errors(st, &exact, &file.properties);
            assert!(e.iter().all(|&v| v <= 1e-8), "{name} s = {s}: {e:?}");
        }
    }
}

#[test]
fn oracle_rejects_custom_load() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(case_path("i_a.toml")).unwrap().replace(
        "type = \"buoyant_weight\"",
        "type = \"custom\"\nsegments = [{ start = 0.0, end = 50.0, force = [0.0, 0.0, -21.0] }]",
    );
    let file = dir.path().join("custom.toml");
    std::fs::write(&file, text).unwrap();
    assert_eq!(run(&["solve", path_str(&file)]).status.code(), Some(0));
    let o = run(&["oracle", path_str(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no closed-form reference"), "{}", stderr(&o));
}

#[test]
fn oracle_infers_convention() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(case_path("ii_a.toml"))
        .unwrap()
        .replace("convention = \"II\"\n", "");
    let file = dir.path().join("ii_a.toml");
    std::fs::write(&file, text).unwrap();
    let o = run(&["oracle", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_profile(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rows[0].1.position.x, 25.0);
    assert!((rows[100].1.position.x).abs() < 1e-8);
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve", path_str(&case_path("ii_e.toml"))],
        vec!["oracle", path_str(&case_path("i_c.toml"))],
        vec!["validate"],
    ] {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("run{k}"));
            let mut full = args.clone();
            full.extend(["--out", path_str(&out)]);
            let o = run(&full);
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
            outputs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}

fn section_rows(report: &str) -> Vec<Vec<&str>> {
    report
        .split("\n\n")
        .filter(|block| block.starts_with('['))
        .map(|block| block.lines().skip(2).collect())
        .collect()
}

fn parse_row(row: &str) -> Vec<Option<f64>> {
    row.split_whitespace()
        .skip(1)
        .map(|v| if v == "-" { None } else { Some(v.parse().unwrap()) })
        .collect()
}

#[test]
fn validate_default_and_overrides() {
    let o = run(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let default = String::from_utf8(o.stdout).unwrap();
    let sections = section_rows(&default);
    assert_eq!(sections.len(), 3);
    assert!(sections.iter().all(|rows| rows.len() == 10));
    assert!(default.contains("PASS"));

    // A slack integrator tolerance inflates the errors; the report keeps its shape.
    let o = run(&["validate", "--tol-rkf45", "1e-4"]);
    assert_eq!(o.status.code(), Some(3));
    let loose = String::from_utf8(o.stdout).unwrap();
    let loose_sections = section_rows(&loose);
    assert!(loose_sections.iter().all(|rows| rows.len() == 10));
    let max_along = |rows: &[&str]| rows.iter().flat_map(|r| parse_row(r)).flatten().fold(0.0, f64::max);
    assert!(max_along(&loose_sections[2]) > 10.0 * max_along(&sections[2]));

    // A tighter Newton tolerance does not degrade the boundary errors.
    let o = run(&["validate", "--tol-newton", "1e-12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let tight = String::from_utf8(o.stdout).unwrap();
    let tight_sections = section_rows(&tight);
    for k in 0..2 {
        assert!(max_along(&tight_sections[k]) <= max_along(&sections[k]) * 1.01);
    }
}

#[test]
fn committed_cases_match_the_catalog() {
    for case in build_catalog() {
        let name = format!(
            "{}_{}.toml",
            case.id.convention.to_string().to_lowercase(),
            case.id.bc.letter()
        );
        let file = CaseFile::parse(&std::fs::read_to_string(case_path(&name)).unwrap()).unwrap();
        assert_eq!(file, CaseFile::from_catalog(&case), "{name}");
        assert_eq!(
            format!("{:?}", file.to_problem().unwrap()),
            format!("{:?}", case.problem),
            "{name}"
        );
        let convention = file.convention.unwrap_or(Convention::I);
        assert_eq!(file.to_catenary(convention).unwrap(), case.reference, "{name}");
    }
}
