//! Validation of the shooting solver against the elastic catenary on ten
//! reference configurations: a ball joint at one end and one of five joints
//! at the other, with `s` running from either end.

use std::fmt::{self, Write as _};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::catenary::{
    semi_analytic_solve, CatenaryCase, CatenaryParameters, CatenaryPoint, CatenarySolution, PlanarJoint,
};
use crate::error::Result;
use crate::integrate::Trajectory;
use crate::model::{buoyant_weight_load, Convention, LineProperties, StateVector, Vec3};
use crate::shoot::{solve, BoundaryJoint, ShootingProblem, ShootingSolution};

/// Stiffness of the spring joints in the catalog, N/m.
pub const SPRING_STIFFNESS: f64 = 1e4;
/// Ratio `ωL / F_x` fixing the imposed horizontal forces.
pub const FORCE_RATIO: f64 = 10.0;
/// Acceptance ceiling for every dimensionless error.
pub const ERROR_GATE: f64 = 1e-8;

/// Reported fields, in report column order.
pub const FIELDS: [&str; 4] = ["x", "z", "n_x", "n_z"];
const FIELD_COMPONENTS: [usize; 4] = [0, 2, 3, 5];

/// Boundary condition at the far (non-ball) joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BcType {
    /// Ball joint.
    A,
    /// Imposed force.
    B,
    /// Spring.
    C,
    /// Slider with imposed axial force.
    D,
    /// Slider with axial spring.
    E,
}

impl BcType {
    pub const ALL: [BcType; 5] = [BcType::A, BcType::B, BcType::C, BcType::D, BcType::E];

    pub fn letter(self) -> char {
        match self {
            BcType::A => 'a',
            BcType::B => 'b',
            BcType::C => 'c',
            BcType::D => 'd',
            BcType::E => 'e',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseId {
    pub convention: Convention,
    pub bc: BcType,
}

impl CaseId {
    pub fn all() -> Vec<CaseId> {
        [Convention::I, Convention::II]
            .into_iter()
            .flat_map(|convention| BcType::ALL.into_iter().map(move |bc| CaseId { convention, bc }))
            .collect()
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})-({})", self.convention, self.bc.letter())
    }
}

impl std::str::FromStr for CaseId {
    type Err = crate::Error;

    /// Parses `I-a`, `(II)-(e)` and similar.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect();
        let (conv, bc) = cleaned
            .split_once('-')
            .ok_or_else(|| crate::Error::invalid(format!("bad case id {s:?}, expected e.g. I-a")))?;
        let convention = match conv {
            "I" | "i" => Convention::I,
            "II" | "ii" => Convention::II,
            _ => return Err(crate::Error::invalid(format!("bad convention in case id {s:?}"))),
        };
        let bc = BcType::ALL
            .into_iter()
            .find(|b| bc.len() == 1 && bc.eq_ignore_ascii_case(&b.letter().to_string()))
            .ok_or_else(|| crate::Error::invalid(format!("bad boundary type in case id {s:?}")))?;
        Ok(CaseId { convention, bc })
    }
}

/// Solver settings shared by every catalog case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogSettings {
    pub newton_tol: f64,
    pub rkf45_tol: f64,
    pub guess_c: f64,
}

impl Default for CatalogSettings {
    fn default() -> Self {
        CatalogSettings {
            newton_tol: 1e-8,
            rkf45_tol: 1e-8,
            guess_c: 10.0,
        }
    }
}

/// Steel line of 50 m.
pub fn reference_properties() -> LineProperties {
    LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0).expect("reference properties are valid")
}

#[derive(Debug, Clone)]
pub struct CatalogCase {
    pub id: CaseId,
    pub problem: ShootingProblem,
    pub reference: CatenaryCase,
}

/// The far joint of a case, located at `x = 25, z = 0`.
fn far_joint(bc: BcType, props: &LineProperties) -> BoundaryJoint {
    let a = Vec3::new(25.0, 0.0, 0.0);
    let axis = Vec3::x();
    let fx = props.total_weight() / FORCE_RATIO;
    match bc {
        BcType::A => BoundaryJoint::Spherical { anchor: a },
        BcType::B => BoundaryJoint::ImposedForce {
            force: Vec3::new(fx, 0.0, 0.0),
        },
        BcType::C => BoundaryJoint::Spring {
            stiffness: SPRING_STIFFNESS,
            ref_point: a,
        },
        BcType::D => BoundaryJoint::LinearAnnular {
            axis,
            axial_force: fx,
            transverse_position: [0.0, 0.0],
        },
        BcType::E => BoundaryJoint::SpringLinearAnnular {
            axis,
            stiffness: SPRING_STIFFNESS,
            ref_point: a,
            transverse_position: [0.0, 0.0],
        },
    }
}

pub fn build_case(id: CaseId, settings: &CatalogSettings) -> CatalogCase {
    let props = reference_properties();
    let ball = BoundaryJoint::Spherical { anchor: Vec3::zeros() };
    let far = far_joint(id.bc, &props);
    let (start, end) = match id.convention {
        Convention::I => (ball, far),
        Convention::II => (far, ball),
    };

    let mut problem = ShootingProblem::new(props, Arc::new(buoyant_weight_load(&props)), start.clone(), end.clone());
    problem.newton = problem.newton.with_tol(settings.newton_tol);
    problem.integrator = problem.integrator.with_abs_tol(settings.rkf45_tol);
    problem.guess.c = settings.guess_c;
    // Unknown start positions are first placed at the far anchor point.
    let position_guess = matches!(id.bc, BcType::B | BcType::D | BcType::E) && id.convention == Convention::II;
    if position_guess {
        problem.guess.position = Some(Vec3::new(25.0, 0.0, 0.0));
    }

    let planar = |j: &BoundaryJoint| PlanarJoint::from_boundary(j).expect("catalog joints are planar");
    let mut reference = CatenaryCase::new(props, id.convention, planar(&start), planar(&end));
    reference.guess_c = settings.guess_c;
    if position_guess {
        reference.guess_position = Some((25.0, 0.0));
    }
    CatalogCase { id, problem, reference }
}

/// All ten configurations in report order: (I)-(a) … (II)-(e).
pub fn build_catalog() -> Vec<CatalogCase> {
    build_catalog_with(&CatalogSettings::default())
}

pub fn build_catalog_with(settings: &CatalogSettings) -> Vec<CatalogCase> {
    CaseId::all().into_iter().map(|id| build_case(id, settings)).collect()
}

/// Dimensionless errors of one state against the exact fields: positions over
/// `L`, tensions over `ωL`, in [`FIELDS`] order.
pub fn point_errors(state: &StateVector, exact: &CatenaryPoint, props: &LineProperties) -> [f64; 4] {
    let exact = exact.to_state();
    let (l, wl) = (props.length, props.total_weight().abs());
    FIELD_COMPONENTS.map(|c| {
        let scale = if c < 3 { l } else { wl };
        (state.component(c) - exact.component(c)).abs() / scale
    })
}

/// Maximum dimensionless error of each field over the trajectory samples.
/// The reference is evaluated at exactly the integrator's abscissae.
pub fn dimensionless_errors(
    traj: &Trajectory,
    oracle: &CatenaryParameters,
    props: &LineProperties,
) -> Result<[f64; 4]> {
    let mut worst = [0.0f64; 4];
    for (s, state) in traj.iter() {
        let exact = crate::catenary::to_global(*s, oracle, props)?;
        for (w, e) in worst.iter_mut().zip(point_errors(state, &exact, props)) {
            *w = w.max(e);
        }
    }
    Ok(worst)
}

/// Fields held at a constant by the start joint; they carry no error.
pub fn imposed_start_fields(joint: &BoundaryJoint) -> [bool; 4] {
    match joint {
        BoundaryJoint::Spherical { .. } => [true, true, false, false],
        BoundaryJoint::ImposedForce { .. } => [false, false, true, true],
        BoundaryJoint::Spring { .. } => [false; 4],
        BoundaryJoint::LinearAnnular { .. } => [false, true, true, false],
        BoundaryJoint::SpringLinearAnnular { .. } => [false, true, false, false],
        BoundaryJoint::Punctual { .. } => [false, true, true, true],
    }
}

/// Errors of one successful case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseErrors {
    /// Start-end errors; `None` for directly imposed fields.
    pub initial: [Option<f64>; 4],
    pub last: [f64; 4],
    pub along_line: [f64; 4],
    /// Largest `|y|` or `|n_y|` on the trajectory (absolute).
    pub out_of_plane: f64,
    pub newton_iterations: usize,
    pub residual_norm: f64,
    pub reference_iterations: usize,
    pub reference_residual: f64,
}

impl CaseErrors {
    /// Largest dimensionless error of the case.
    pub fn max_error(&self) -> f64 {
        self.initial
            .iter()
            .flatten()
            .chain(&self.last)
            .chain(&self.along_line)
            .fold(0.0, |a, &b| a.max(b))
    }

    pub fn compute(case: &CatalogCase, shot: &ShootingSolution, reference: &CatenarySolution) -> Result<Self> {
        let props = &case.problem.props;
        let traj = &shot.trajectory;
        let exact0 = reference.at(0.0, props)?;
        let exact_l = reference.at(props.length, props)?;
        let imposed = imposed_start_fields(&case.problem.joint_start);
        let start = point_errors(traj.first(), &exact0, props);
        let initial = std::array::from_fn(|i| (!imposed[i]).then_some(start[i]));
        let out_of_plane = traj
            .iter()
            .map(|(_, st)| st.position.y.abs().max(st.tension.y.abs()))
            .fold(0.0, f64::max);
        Ok(CaseErrors {
            initial,
            last: point_errors(traj.last(), &exact_l, props),
            along_line: dimensionless_errors(traj, &reference.params, props)?,
            out_of_plane,
            newton_iterations: shot.newton_iterations,
            residual_norm: shot.residual_norm,
            reference_iterations: reference.iterations,
            reference_residual: reference.residual_norm,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub id: CaseId,
    /// Errors, or the failure message of the reference or shooting solve.
    pub outcome: std::result::Result<CaseErrors, String>,
    /// Wall-clock time of the shooting solve.
    pub runtime: Duration,
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// One entry per case, in catalog order.
    pub cases: Vec<CaseReport>,
    pub gate: f64,
}

impl ErrorReport {
    pub fn max_error(&self) -> Option<f64> {
        self.cases
            .iter()
            .map(|c| c.outcome.as_ref().ok().map(CaseErrors::max_error))
            .try_fold(0.0f64, |a, e| e.map(|e| a.max(e)))
    }

    /// Every case succeeded and every error is within the gate.
    pub fn passes(&self) -> bool {
        self.max_error().is_some_and(|e| e <= self.gate)
    }

    /// Plain-text report: start-end, final-end and along-line tables, then a
    /// one-line verdict. Contains no timings, so it is reproducible.
    pub fn render(&self) -> String {
        let mut out = String::new();
        type Column = fn(&CaseErrors) -> [Option<f64>; 4];
        let sections: [(&str, Column); 3] = [
            (
                "INITIAL END POINT ABSOLUTE DIMENSIONLESS ERRORS OF ESTIMATED FIELDS",
                |e| e.initial,
            ),
            ("FINAL END POINT ABSOLUTE DIMENSIONLESS ERRORS", |e| e.last.map(Some)),
            ("MAXIMUM SEGMENT FIELDS ABSOLUTE DIMENSIONLESS ERRORS", |e| {
                e.along_line.map(Some)
            }),
        ];
        for (title, pick) in sections {
            let _ = writeln!(out, "[{title}]");
            let _ = writeln!(
                out,
                "{:<9}{:>10}{:>10}{:>10}{:>10}",
                "case", FIELDS[0], FIELDS[1], FIELDS[2], FIELDS[3]
            );
            for case in &self.cases {
                let _ = write!(out, "{:<9}", case.id.to_string());
                match &case.outcome {
                    Ok(errors) => {
                        for v in pick(errors) {
                            match v {
                                Some(v) => {
                                    let _ = write!(out, "{:>10}", sci(v));
                                }
                                None => {
                                    let _ = write!(out, "{:>10}", "-");
                                }
                            }
                        }
                        let _ = writeln!(out);
                    }
                    Err(msg) => {
                        let _ = writeln!(out, "  FAILED: {msg}");
                    }
                }
            }
            let _ = writeln!(out);
        }
        let verdict = if self.passes() { "PASS" } else { "FAIL" };
        match self.max_error() {
            Some(e) => {
                let _ = writeln!(out, "max error {}, gate {}: {verdict}", sci(e), sci(self.gate));
            }
            None => {
                let _ = writeln!(out, "one or more cases failed, gate {}: {verdict}", sci(self.gate));
            }
        }
        out
    }
}

/// Three significant digits with a signed two-digit exponent: `2.34E-10`.
pub fn sci(v: f64) -> String {
    let raw = format!("{v:.2E}");
    match raw.split_once('E') {
        Some((mantissa, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            format!("{mantissa}E{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => raw,
    }
}

fn run_case(case: &CatalogCase) -> CaseReport {
    let started = Instant::now();
    let outcome = (|| {
        let reference = semi_analytic_solve(&case.reference).map_err(|e| format!("reference: {e}"))?;
        let shot = solve(&case.problem).map_err(|e| format!("shooting: {e}"))?;
        CaseErrors::compute(case, &shot, &reference).map_err(|e| e.to_string())
    })();
    CaseReport {
        id: case.id,
        outcome,
        runtime: started.elapsed(),
    }
}

/// Runs every case on its own thread. A failing or panicking case is
/// recorded in its row; the others still run.
pub fn run_validation(catalog: &[CatalogCase]) -> ErrorReport {
    let cases = std::thread::scope(|scope| {
        let handles: Vec<_> = catalog
            .iter()
            .map(|case| (case.id, scope.spawn(|| run_case(case))))
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| {
                h.join().unwrap_or_else(|_| CaseReport {
                    id,
                    outcome: Err("solver panicked".into()),
                    runtime: Duration::ZERO,
                })
            })
            .collect()
    });
    ErrorReport {
        cases,
        gate: ERROR_GATE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::Trajectory;

    fn id(s: &str) -> CaseId {
        s.parse().unwrap()
    }

    #[test]
    fn ten_distinct_cases() {
        let catalog = build_catalog();
        assert_eq!(catalog.len(), 10);
        let mut ids: Vec<_> = catalog.iter().map(|c| c.id).collect();
        ids.dedup();
        assert_eq!(ids.len(), 10);
        assert_eq!(catalog[0].id.to_string(), "(I)-(a)");
        assert_eq!(catalog[9].id.to_string(), "(II)-(e)");
    }

    #[test]
    fn case_id_parsing() {
        assert_eq!(
            id("I-a"),
            CaseId {
                convention: Convention::I,
                bc: BcType::A
            }
        );
        assert_eq!(
            id("(II)-(e)"),
            CaseId {
                convention: Convention::II,
                bc: BcType::E
            }
        );
        assert!("III-a".parse::<CaseId>().is_err());
        assert!("I-f".parse::<CaseId>().is_err());
    }

    #[test]
    fn imposed_force_value() {
        let case = build_case(id("I-b"), &CatalogSettings::default());
        match case.problem.joint_end {
            BoundaryJoint::ImposedForce { force } => {
                assert!((force.x - 105.20364172500001).abs() < 1e-9);
                assert_eq!((force.y, force.z), (0.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn convention_two_starts_at_far_joint() {
        let case = build_case(id("II-a"), &CatalogSettings::default());
        assert_eq!(
            case.problem.joint_start,
            BoundaryJoint::Spherical {
                anchor: Vec3::new(25.0, 0.0, 0.0)
            }
        );
        assert_eq!(
            case.problem.joint_end,
            BoundaryJoint::Spherical { anchor: Vec3::zeros() }
        );
    }

    #[test]
    fn self_comparison_is_exact() {
        let case = build_case(id("I-a"), &CatalogSettings::default());
        let sol = semi_analytic_solve(&case.reference).unwrap();
        let props = case.problem.props;
        let samples: Vec<_> = (0..=50)
            .map(|i| (i as f64, sol.at(i as f64, &props).unwrap().to_state()))
            .collect();
        let traj = Trajectory::new(samples.clone()).unwrap();
        assert_eq!(dimensionless_errors(&traj, &sol.params, &props).unwrap(), [0.0; 4]);

        let delta = 1e-3;
        let shifted = samples
            .into_iter()
            .map(|(s, mut st)| {
                st.position.x += delta;
                (s, st)
            })
            .collect();
        let traj = Trajectory::new(shifted).unwrap();
        let e = dimensionless_errors(&traj, &sol.params, &props).unwrap();
        assert!((e[0] - delta / props.length).abs() < 1e-15);
        assert_eq!(&e[1..], &[0.0; 3]);
    }

    #[test]
    fn dash_pattern() {
        let pattern =
            |s: &str| imposed_start_fields(&build_case(id(s), &CatalogSettings::default()).problem.joint_start);
        for bc in ["a", "b", "c", "d", "e"] {
            assert_eq!(pattern(&format!("I-{bc}")), [true, true, false, false]);
        }
        assert_eq!(pattern("II-a"), [true, true, false, false]);
        assert_eq!(pattern("II-b"), [false, false, true, true]);
        assert_eq!(pattern("II-c"), [false; 4]);
        assert_eq!(pattern("II-d"), [false, true, true, false]);
        assert_eq!(pattern("II-e"), [false, true, false, false]);
    }

    #[test]
    fn reference_curves_coincide_across_conventions() {
        let settings = CatalogSettings::default();
        for bc in BcType::ALL {
            let one = build_case(
                CaseId {
                    convention: Convention::I,
                    bc,
                },
                &settings,
            );
            let two = build_case(
                CaseId {
                    convention: Convention::II,
                    bc,
                },
                &settings,
            );
            let a = semi_analytic_solve(&one.reference).unwrap();
            let b = semi_analytic_solve(&two.reference).unwrap();
            let props = one.problem.props;
            for i in 0..=100 {
                let s = 0.5 * i as f64;
                let p = a.at(s, &props).unwrap();
                let q = b.at(props.length - s, &props).unwrap();
                assert!((p.x - q.x).abs() <= 1e-9 * props.length, "{bc:?} x at {s}");
                assert!((p.z - q.z).abs() <= 1e-9 * props.length, "{bc:?} z at {s}");
            }
        }
    }

    #[test]
    fn single_case_pipeline() {
        let catalog = vec![build_case(id("I-a"), &CatalogSettings::default())];
        let report = run_validation(&catalog);
        let errors = report.cases[0].outcome.as_ref().unwrap();
        assert!(errors.max_error() <= ERROR_GATE, "{errors:?}");
        assert_eq!(errors.initial[0], None);
        assert!(report.passes());
        let text = report.render();
        assert!(text.contains("(I)-(a)"));
        assert_eq!(text.matches('[').count(), 3);
    }

    #[test]
    fn scientific_format() {
        assert_eq!(sci(2.34e-10), "2.34E-10");
        assert_eq!(sci(1.14e-9), "1.14E-09");
        assert_eq!(sci(0.0), "0.00E+00");
        assert_eq!(sci(1e-8), "1.00E-08");
    }

    #[test]
    fn failures_are_recorded() {
        let mut case = build_case(id("I-a"), &CatalogSettings::default());
        case.problem.newton.max_iter = 1;
        let report = run_validation(&[case]);
        assert!(report.cases[0].outcome.is_err());
        assert!(!report.passes());
        assert!(report.render().contains("FAILED"));
    }
}
