//! Command-line front end: `solve`, `oracle` and `validate`.
//!
//! Exit codes: 0 success, 2 bad input, 3 no convergence (or failed
//! validation gate), 4 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::catenary::{semi_analytic_solve, CatenaryCase, PlanarJoint};
use crate::error::Error;
use crate::integrate::IntegratorSettings;
use crate::model::{
    buoyant_weight_load, Convention, DistributedLoad, LineProperties, LoadSegment, PiecewiseConstantLoad, StateVector,
    Vec3,
};
use crate::shoot::{solve, BoundaryJoint, GuessSettings, NewtonSettings, ShootingProblem};
use crate::verify::{build_catalog_with, run_validation, CatalogCase, CatalogSettings};

/// Header of every profile file.
pub const PROFILE_HEADER: &str = "s,x,y,z,n_x,n_y,n_z";

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CONVERGENCE: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Distributed load section of a case file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    /// Submerged weight `(0, 0, −ω)`.
    BuoyantWeight,
    /// Piecewise-constant force per unit length over `[start, end)` intervals.
    Custom { segments: Vec<LoadSegment> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_iter")]
    pub newton_max_iter: usize,
    #[serde(default = "default_tol")]
    pub rkf45_abs_tol: f64,
    #[serde(default = "default_c")]
    pub guess_c: f64,
    /// Start position guess for unknown position components, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess_position: Option<[f64; 3]>,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    NewtonSettings::default().max_iter
}

fn default_c() -> f64 {
    10.0
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            newton_tol: default_tol(),
            newton_max_iter: default_max_iter(),
            rkf45_abs_tol: default_tol(),
            guess_c: default_c(),
            guess_position: None,
        }
    }
}

/// A line problem as stored on disk (TOML, SI units).
///
/// ```toml
/// convention = "I"
///
/// [properties]
/// length = 50.0            # m
/// young_modulus = 2.11e11  # Pa
/// cross_area = 3.1426e-4   # m²
/// density_material = 7850.0
/// density_fluid = 1025.0   # kg/m³
///
/// [load]
/// type = "buoyant_weight"
///
/// [joint_start]
/// type = "spherical"
/// anchor = [0.0, 0.0, 0.0]
///
/// [joint_end]
/// type = "imposed_force"
/// force = [105.2, 0.0, 0.0]  # N
///
/// [solver]
/// newton_tol = 1e-8
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    /// Direction of `s` for the catenary reference; tried both ways if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    pub properties: LineProperties,
    pub load: LoadSpec,
    pub joint_start: BoundaryJoint,
    pub joint_end: BoundaryJoint,
    #[serde(default)]
    pub solver: SolverSpec,
}

impl CaseFile {
    pub fn parse(text: &str) -> crate::Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("case files always serialize")
    }

    /// Case file of a catalog configuration.
    pub fn from_catalog(case: &CatalogCase) -> Self {
        let p = &case.problem;
        CaseFile {
            convention: Some(case.id.convention),
            properties: p.props,
            load: LoadSpec::BuoyantWeight,
            joint_start: p.joint_start.clone(),
            joint_end: p.joint_end.clone(),
            solver: SolverSpec {
                newton_tol: p.newton.tol,
                newton_max_iter: p.newton.max_iter,
                rkf45_abs_tol: p.integrator.abs_tol,
                guess_c: p.guess.c,
                guess_position: p.guess.position.map(Into::into),
            },
        }
    }

    pub fn to_problem(&self) -> crate::Result<ShootingProblem> {
        self.properties.validate()?;
        let load: Arc<dyn DistributedLoad> = match &self.load {
            LoadSpec::BuoyantWeight => Arc::new(buoyant_weight_load(&self.properties)),
            LoadSpec::Custom { segments } => Arc::new(PiecewiseConstantLoad::new(segments.clone())?),
        };
        let s = &self.solver;
        let problem = ShootingProblem {
            props: self.properties,
            load,
            joint_start: self.joint_start.clone(),
            joint_end: self.joint_end.clone(),
            integrator: IntegratorSettings::for_length(self.properties.length).with_abs_tol(s.rkf45_abs_tol),
            newton: NewtonSettings {
                max_iter: s.newton_max_iter,
                ..NewtonSettings::default().with_tol(s.newton_tol)
            },
            guess: GuessSettings {
                c: s.guess_c,
                position: s.guess_position.map(Vec3::from),
                tension: None,
            },
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Catenary reference for this case; only the submerged-weight load has one.
    pub fn to_catenary(&self, convention: Convention) -> crate::Result<CatenaryCase> {
        if self.load != LoadSpec::BuoyantWeight {
            return Err(Error::NoReference("a custom load has no closed-form reference".into()));
        }
        self.properties.validate()?;
        let mut case = CatenaryCase::new(
            self.properties,
            convention,
            PlanarJoint::from_boundary(&self.joint_start)?,
            PlanarJoint::from_boundary(&self.joint_end)?,
        );
        case.guess_c = self.solver.guess_c;
        case.guess_position = self.solver.guess_position.map(|p| (p[0], p[2]));
        Ok(case)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.tol_newton {
            self.solver.newton_tol = t;
        }
        if let Some(t) = o.tol_rkf45 {
            self.solver.rkf45_abs_tol = t;
        }
        if let Some(c) = o.guess_c {
            self.solver.guess_c = c;
        }
    }
}

/// One CSV row per state, `s` first, shortest round-trip formatting.
pub fn format_profile<'a>(rows: impl IntoIterator<Item = (f64, &'a StateVector)>) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for (s, st) in rows {
        let v = st.to_vector();
        let _ = writeln!(
            out,
            "{s:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            v[0], v[1], v[2], v[3], v[4], v[5]
        );
    }
    out
}

/// Parses a profile written by [`format_profile`].
pub fn parse_profile(text: &str) -> crate::Result<Vec<(f64, StateVector)>> {
    let mut lines = text.lines();
    if lines.next() != Some(PROFILE_HEADER) {
        return Err(Error::invalid("missing profile header"));
    }
    lines
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| Error::invalid(format!("{line:?}: {e}"))))
                .collect::<crate::Result<_>>()?;
            if v.len() != 7 {
                return Err(Error::invalid(format!("expected 7 columns: {line:?}")));
            }
            Ok((
                v[0],
                StateVector::new(Vec3::new(v[1], v[2], v[3]), Vec3::new(v[4], v[5], v[6])),
            ))
        })
        .collect()
}

#[derive(Debug, Parser)]
#[command(
    name = "mooring-shoot",
    version,
    about = "Static 3D elastic line solver (single shooting)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Newton tolerance on the end-constraint residual (max norm)
    #[arg(long)]
    pub tol_newton: Option<f64>,
    /// RKF45 absolute error per step
    #[arg(long)]
    pub tol_rkf45: Option<f64>,
    /// Guess ratio c = wL/|n| for unknown start tensions
    #[arg(long)]
    pub guess_c: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a case file by shooting and write the line profile as CSV
    Solve {
        case: PathBuf,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate the closed-form catenary for a case file on a uniform grid
    Oracle {
        case: PathBuf,
        /// Number of samples, ends included
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the ten reference configurations and write the error report
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_convergence_failure() {
            EXIT_CONVERGENCE
        } else {
            EXIT_PARSE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn load_case(path: &Path, overrides: &Overrides) -> Result<CaseFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut case = CaseFile::parse(&text).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })?;
    case.apply(overrides);
    Ok(case)
}

/// Writes `text` to `out`, or to stdout. Returns whether stdout was used.
fn emit(out: Option<&Path>, text: &str) -> Result<bool, Failure> {
    match out {
        Some(path) => fs::write(path, text).map(|_| false).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map(|_| true)
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

/// Status lines go to stdout unless stdout carries the data.
fn status(data_on_stdout: bool, line: &str) {
    if data_on_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn cmd_solve(case: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<(), Failure> {
    let problem = load_case(case, overrides)?.to_problem()?;
    let sol = solve(&problem)?;
    let text = format_profile(sol.trajectory.iter().map(|(s, st)| (*s, st)));
    let stdout = emit(out, &text)?;
    status(
        stdout,
        &format!(
            "converged: {} Newton iterations, residual {:.3e}{}, {} samples",
            sol.newton_iterations,
            sol.residual_norm,
            if sol.roundoff_limited { " (round-off floor)" } else { "" },
            sol.trajectory.len()
        ),
    );
    Ok(())
}

fn cmd_oracle(case: &Path, samples: usize, out: Option<&Path>, overrides: &Overrides) -> Result<(), Failure> {
    if samples < 2 {
        return Err(Failure {
            code: EXIT_PARSE,
            message: "--samples must be at least 2".into(),
        });
    }
    let file = load_case(case, overrides)?;
    let conventions = match file.convention {
        Some(c) => vec![c],
        None => vec![Convention::I, Convention::II],
    };
    let mut last_err = None;
    let mut found = None;
    for conv in conventions {
        let reference = file.to_catenary(conv)?;
        match semi_analytic_solve(&reference) {
            Ok(sol) => {
                found = Some(sol);
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let sol = match (found, last_err) {
        (Some(sol), _) => sol,
        (None, Some(e)) => return Err(e.into()),
        (None, None) => unreachable!("at least one convention is tried"),
    };
    let props = &file.properties;
    let rows = (0..samples)
        .map(|i| {
            let s = if i + 1 == samples {
                props.length
            } else {
                props.length * i as f64 / (samples - 1) as f64
            };
            sol.at(s, props).map(|p| (s, p.to_state()))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let text = format_profile(rows.iter().map(|(s, st)| (*s, st)));
    let stdout = emit(out, &text)?;
    let p = sol.params;
    status(
        stdout,
        &format!(
            "reference: convention {}, N_x0 {:?}, N_z0 {:?}, x_A {:?}, z_A {:?}, {} iterations",
            p.convention, p.n_x0, p.n_z0, p.x_a, p.z_a, sol.iterations
        ),
    );
    Ok(())
}

fn cmd_validate(out: Option<&Path>, overrides: &Overrides) -> Result<(), Failure> {
    let defaults = CatalogSettings::default();
    let settings = CatalogSettings {
        newton_tol: overrides.tol_newton.unwrap_or(defaults.newton_tol),
        rkf45_tol: overrides.tol_rkf45.unwrap_or(defaults.rkf45_tol),
        guess_c: overrides.guess_c.unwrap_or(defaults.guess_c),
    };
    let report = run_validation(&build_catalog_with(&settings));
    let stdout = emit(out, &report.render())?;
    for case in &report.cases {
        let detail = match &case.outcome {
            Ok(e) => format!("{} Newton iterations", e.newton_iterations),
            Err(msg) => format!("failed: {msg}"),
        };
        status(
            stdout,
            &format!(
                "{:<9} {:>8.2} ms  {detail}",
                case.id.to_string(),
                case.runtime.as_secs_f64() * 1e3
            ),
        );
    }
    if report.passes() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CONVERGENCE,
            message: format!("validation gate {:e} not met", report.gate),
        })
    }
}

/// Runs the parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let result = match &cli.command {
        Command::Solve { case, out, overrides } => cmd_solve(case, out.as_deref(), overrides),
        Command::Oracle {
            case,
            samples,
            out,
            overrides,
        } => cmd_oracle(case, *samples, out.as_deref(), overrides),
        Command::Validate { out, overrides } => cmd_validate(out.as_deref(), overrides),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Entry point of the binary.
pub fn run() -> ExitCode {
    // clap exits with status 2 on bad arguments
    ExitCode::from(execute(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{build_catalog, CaseId};

    const MINIMAL: &str = r#"
[properties]
length = 50.0
young_modulus = 2.11e11
cross_area = 3.1426e-4
density_material = 7850.0
density_fluid = 1025.0

[load]
type = "buoyant_weight"

[joint_start]
type = "spherical"
anchor = [0.0, 0.0, 0.0]

[joint_end]
type = "spherical"
anchor = [25.0, 0.0, 0.0]
"#;

    #[test]
    fn minimal_case_uses_defaults() {
        let case = CaseFile::parse(MINIMAL).unwrap();
        assert_eq!(case.solver, SolverSpec::default());
        assert_eq!(case.properties.gravity, 9.81);
        assert_eq!(case.convention, None);
        let problem = case.to_problem().unwrap();
        assert_eq!(problem.newton.tol, 1e-8);
        assert_eq!(problem.integrator.abs_tol, 1e-8);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("length = 50.0", "lenght = 50.0");
        let err = CaseFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("lenght"), "{err}");
    }

    #[test]
    fn non_finite_values_rejected() {
        let text = MINIMAL.replace("length = 50.0", "length = nan");
        let case = CaseFile::parse(&text).unwrap();
        assert!(case.to_problem().is_err());
    }

    #[test]
    fn catalog_round_trip() {
        for case in build_catalog() {
            let file = CaseFile::from_catalog(&case);
            let back = CaseFile::parse(&file.to_toml()).unwrap();
            assert_eq!(back, file, "{}", case.id);
            assert_eq!(
                format!("{:?}", back.to_problem().unwrap()),
                format!("{:?}", case.problem)
            );
        }
    }

    #[test]
    fn custom_load_has_no_reference() {
        let text = MINIMAL.replace(
            "type = \"buoyant_weight\"",
            "type = \"custom\"\nsegments = [{ start = 0.0, end = 50.0, force = [0.0, 0.0, -10.0] }]",
        );
        let case = CaseFile::parse(&text).unwrap();
        assert!(case.to_problem().is_ok());
        assert!(matches!(case.to_catenary(Convention::I), Err(Error::NoReference(_))));
    }

    #[test]
    fn profile_round_trip() {
        let states = [
            (
                0.0,
                StateVector::new(Vec3::new(0.1, -0.0, 1e-300), Vec3::new(1.0 / 3.0, 2.5e17, -7.0)),
            ),
            (
                50.0,
                StateVector::new(Vec3::new(f64::MIN_POSITIVE, 3.0, 4.0), Vec3::new(5.0, 6.0, 0.7)),
            ),
        ];
        let text = format_profile(states.iter().map(|(s, st)| (*s, st)));
        assert!(text.starts_with("s,x,y,z,n_x,n_y,n_z\n"));
        let back = parse_profile(&text).unwrap();
        assert_eq!(back.len(), 2);
        for ((s, a), (t, b)) in states.iter().zip(&back) {
            assert_eq!(s.to_bits(), t.to_bits());
            for i in 0..6 {
                assert_eq!(a.component(i).to_bits(), b.component(i).to_bits());
            }
        }
    }

    #[test]
    fn overrides_apply() {
        let mut case = CaseFile::parse(MINIMAL).unwrap();
        case.apply(&Overrides {
            tol_newton: Some(1e-10),
            tol_rkf45: None,
            guess_c: Some(3.0),
        });
        assert_eq!(case.solver.newton_tol, 1e-10);
        assert_eq!(case.solver.rkf45_abs_tol, 1e-8);
        assert_eq!(case.solver.guess_c, 3.0);
    }

    #[test]
    fn catalog_reference_from_file() {
        let case = build_catalog()
            .into_iter()
            .find(|c| c.id == "II-d".parse::<CaseId>().unwrap())
            .unwrap();
        let file = CaseFile::from_catalog(&case);
        assert_eq!(file.to_catenary(Convention::II).unwrap(), case.reference);
    }
}
