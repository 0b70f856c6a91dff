//! Single shooting for the static string two-point boundary value problem.
//!
//! The start joint fixes three of the six state components at `s = 0`; the
//! other three are the Newton unknowns. Each residual evaluation integrates
//! the IVP to `s = L` and measures the three constraints of the end joint.

pub mod joint;
pub mod newton;

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::integrate::{integrate_string, IntegratorSettings, Trajectory};
use crate::model::{DistributedLoad, LineProperties, StateVector, Vec3};

pub use joint::{
    assemble_initial_state, boundary_force, end_constraints, BoundaryJoint, End, Partition, COMPONENT_NAMES,
};
pub use newton::{fd_jacobian, newton_solve, NewtonReport, NewtonSettings};

/// Tension guess used when the line is weightless, as a fraction of `EA`.
const WEIGHTLESS_GUESS_FRACTION: f64 = 1e-6;

/// First-guess policy for the start unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessSettings {
    /// Tension guess ratio `c = ωL / |n|`.
    pub c: f64,
    /// Start position guess, used for every unknown position component.
    pub position: Option<Vec3>,
    /// Start tension guess, used for every unknown tension component.
    pub tension: Option<Vec3>,
}

impl Default for GuessSettings {
    fn default() -> Self {
        GuessSettings {
            c: 10.0,
            position: None,
            tension: None,
        }
    }
}

/// A complete static line problem.
#[derive(Clone)]
pub struct ShootingProblem {
    pub props: LineProperties,
    pub load: Arc<dyn DistributedLoad>,
    /// Joint at `s = 0`.
    pub joint_start: BoundaryJoint,
    /// Joint at `s = L`.
    pub joint_end: BoundaryJoint,
    pub integrator: IntegratorSettings,
    pub newton: NewtonSettings,
    pub guess: GuessSettings,
}

impl fmt::Debug for ShootingProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShootingProblem")
            .field("props", &self.props)
            .field("joint_start", &self.joint_start)
            .field("joint_end", &self.joint_end)
            .field("integrator", &self.integrator)
            .field("newton", &self.newton)
            .field("guess", &self.guess)
            .finish_non_exhaustive()
    }
}

impl ShootingProblem {
    /// Problem with default integrator, Newton and guess settings.
    pub fn new(
        props: LineProperties,
        load: Arc<dyn DistributedLoad>,
        joint_start: BoundaryJoint,
        joint_end: BoundaryJoint,
    ) -> Self {
        ShootingProblem {
            integrator: IntegratorSettings::for_length(props.length),
            props,
            load,
            joint_start,
            joint_end,
            newton: NewtonSettings::default(),
            guess: GuessSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.props.validate()?;
        self.joint_start.validate()?;
        self.joint_end.validate()?;
        self.integrator.validate(self.props.length)?;
        self.newton.validate()?;
        if !(self.guess.c.is_finite() && self.guess.c > 0.0) {
            return Err(Error::invalid(format!(
                "guess ratio c must be positive, got {}",
                self.guess.c
            )));
        }
        Ok(())
    }

    /// Integrates from the start state built from `unknowns`.
    pub fn integrate(&self, unknowns: &Vec3) -> Result<Trajectory> {
        let state0 = assemble_initial_state(&self.joint_start, unknowns)?;
        integrate_string(&self.props, self.load.as_ref(), state0, &self.integrator)
    }

    /// Typical magnitudes of the unknowns, setting the finite-difference steps:
    /// 1 m for positions and `ωL` for tensions.
    pub fn unknown_scales(&self) -> Result<Vec3> {
        let partition = self.joint_start.partition()?;
        let tension_scale = self.tension_scale();
        Ok(Vector3::from_iterator(partition.unknown.iter().map(|&c| {
            if c < 3 {
                1.0
            } else {
                tension_scale
            }
        })))
    }

    fn tension_scale(&self) -> f64 {
        let weight = self.props.total_weight().abs();
        if weight > 0.0 {
            weight
        } else {
            WEIGHTLESS_GUESS_FRACTION * self.props.axial_stiffness()
        }
    }
}

/// Shooting residual: end-joint constraints after integrating from the start
/// state built from `unknowns`, in ascending component order of the end
/// joint's constrained components.
pub fn residual(problem: &ShootingProblem, unknowns: &Vec3) -> Result<Vec3> {
    let traj = problem.integrate(unknowns)?;
    end_constraints(&problem.joint_end, traj.last())
}

/// Default start unknowns.
///
/// Unknown positions take the supplied position guess; without one, a start
/// spring's reference point, else the end joint's imposed position or spring
/// reference point.
/// Unknown tensions take the magnitude `|ω|L/(c√2)` on `x` and `z`: the `x`
/// component points towards the other end, the `z` component is directed
/// along the weight. The spring-driven coordinates of a start spring are then
/// shifted by `n/k`, so that the spring delivers the guessed tension instead
/// of starting slack.
pub fn default_guess(problem: &ShootingProblem) -> Result<Vec3> {
    let start = &problem.joint_start;
    let end = &problem.joint_end;
    let partition = start.partition()?;
    let start_known = start.position_targets()?;
    let start_ref = start.reference_position()?;
    let end_ref = end.reference_position()?;

    let mut r = Vec3::zeros();
    for i in 0..3 {
        r[i] = match (start_known[i], problem.guess.position) {
            (Some(v), _) => v,
            (None, Some(p)) => p[i],
            (None, None) => start_ref[i].or(end_ref[i]).unwrap_or(0.0),
        };
    }

    let n = match problem.guess.tension {
        Some(n) => n,
        None => tension_guess(problem, &r, &end_ref)?,
    };

    spring_offset(start, &mut r, &n)?;

    let state = StateVector::new(r, n);
    Ok(Vector3::from_iterator(
        partition.unknown.iter().map(|&c| state.component(c)),
    ))
}

fn tension_guess(problem: &ShootingProblem, r_start: &Vec3, end_ref: &[Option<f64>; 3]) -> Result<Vec3> {
    let end_force = boundary_force(&problem.joint_end, r_start, End::End)?;
    let weight = problem.props.total_weight();

    if weight == 0.0 {
        let chord = if end_ref.iter().all(Option::is_some) {
            Vec3::new(end_ref[0].unwrap(), end_ref[1].unwrap(), end_ref[2].unwrap()) - r_start
        } else {
            Vec3::from_iterator(end_force.iter().map(|f| f.unwrap_or(0.0)))
        };
        let dir = if chord.norm() > 0.0 {
            chord.normalize()
        } else {
            Vec3::x()
        };
        return Ok(dir * (WEIGHTLESS_GUESS_FRACTION * problem.props.axial_stiffness()));
    }

    let toward = match (end_ref[0], end_force[0]) {
        (Some(x_end), _) if x_end != r_start.x => (x_end - r_start.x).signum(),
        (_, Some(fx)) if fx != 0.0 => fx.signum(),
        _ => 1.0,
    };
    let magnitude = weight.abs() / (problem.guess.c * std::f64::consts::SQRT_2);
    Ok(Vec3::new(toward * magnitude, 0.0, -weight.signum() * magnitude))
}

/// Shifts the spring-driven coordinates of a start joint by `n/k`. From the
/// spring's reference point this gives exactly `n(0) = n`.
fn spring_offset(start: &BoundaryJoint, r: &mut Vec3, n: &Vec3) -> Result<()> {
    match start {
        BoundaryJoint::Spring { stiffness, .. } => {
            *r += n / *stiffness;
        }
        BoundaryJoint::SpringLinearAnnular { axis, stiffness, .. } => {
            let i = joint::axis_index(axis)?;
            r[i] += n[i] / stiffness;
        }
        _ => {}
    }
    Ok(())
}

/// Converged shooting solution.
#[derive(Debug, Clone)]
pub struct ShootingSolution {
    pub trajectory: Trajectory,
    /// Converged start unknowns, ascending component order.
    pub unknowns_at_start: Vec3,
    /// Final end-constraint residual.
    pub residual: Vec3,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub trace: Vec<f64>,
    /// Newton stopped at the round-off floor before reaching its tolerance.
    pub roundoff_limited: bool,
}

/// Solves the problem from its default guess.
pub fn solve(problem: &ShootingProblem) -> Result<ShootingSolution> {
    problem.validate()?;
    let u0 = default_guess(problem)?;
    solve_from(problem, u0)
}

/// Solves the problem from an explicit vector of start unknowns.
pub fn solve_from(problem: &ShootingProblem, u0: Vec3) -> Result<ShootingSolution> {
    problem.validate()?;
    let report = newton_solve(
        |u: &Vec3| residual(problem, u),
        u0,
        problem.unknown_scales()?,
        &problem.newton,
    )?;
    let trajectory = problem.integrate(&report.root)?;
    let residual = end_constraints(&problem.joint_end, trajectory.last())?;
    Ok(ShootingSolution {
        trajectory,
        unknowns_at_start: report.root,
        residual,
        residual_norm: residual.amax(),
        newton_iterations: report.iterations,
        trace: report.trace,
        roundoff_limited: report.roundoff_limited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{buoyant_weight_load, UniformLoad};

    fn reference() -> LineProperties {
        LineProperties::new(50.0, 2.11e11, 3.1426e-4, 7850.0, 1025.0).unwrap()
    }

    fn ball(x: f64) -> BoundaryJoint {
        BoundaryJoint::Spherical {
            anchor: Vec3::new(x, 0.0, 0.0),
        }
    }

    fn hanging(end: BoundaryJoint) -> ShootingProblem {
        let p = reference();
        ShootingProblem::new(p, Arc::new(buoyant_weight_load(&p)), ball(0.0), end)
    }

    #[test]
    fn guess_for_ball_to_ball() {
        let g = default_guess(&hanging(ball(25.0))).unwrap();
        let m = 21.040728345 * 50.0 / (10.0 * 2f64.sqrt());
        assert!((g - Vec3::new(m, 0.0, -m)).amax() < 1e-9);
        assert!((g.x - 74.39020846926752).abs() < 1e-9);
    }

    #[test]
    fn guess_points_back_in_convention_two() {
        let p = reference();
        let prob = ShootingProblem::new(p, Arc::new(buoyant_weight_load(&p)), ball(25.0), ball(0.0));
        let g = default_guess(&prob).unwrap();
        assert!(g.x < 0.0 && g.z < 0.0);
    }

    #[test]
    fn guess_positions_for_force_start() {
        let p = reference();
        let mut prob = ShootingProblem::new(
            p,
            Arc::new(buoyant_weight_load(&p)),
            BoundaryJoint::ImposedForce {
                force: Vec3::new(105.2, 0.0, 0.0),
            },
            ball(0.0),
        );
        assert_eq!(default_guess(&prob).unwrap(), Vec3::zeros());
        prob.guess.position = Some(Vec3::new(25.0, 0.0, 0.0));
        assert_eq!(default_guess(&prob).unwrap(), Vec3::new(25.0, 0.0, 0.0));
    }

    #[test]
    fn guess_for_start_spring_is_not_singular() {
        let p = reference();
        let a = Vec3::new(25.0, 0.0, 0.0);
        let prob = ShootingProblem::new(
            p,
            Arc::new(buoyant_weight_load(&p)),
            BoundaryJoint::Spring {
                stiffness: 1e4,
                ref_point: a,
            },
            ball(0.0),
        );
        let g = default_guess(&prob).unwrap();
        let st = assemble_initial_state(&prob.joint_start, &g).unwrap();
        let m = 74.39020846926752;
        assert!((st.tension - Vec3::new(-m, 0.0, -m)).amax() < 1e-9);
    }

    #[test]
    fn weightless_guess_runs_along_chord() {
        let mut p = reference();
        p.density_fluid = p.density_material;
        let prob = ShootingProblem::new(p, Arc::new(UniformLoad(Vec3::zeros())), ball(0.0), ball(30.0));
        let g = default_guess(&prob).unwrap();
        assert!((g - Vec3::new(1e-6 * p.axial_stiffness(), 0.0, 0.0)).amax() < 1e-9);
    }

    #[test]
    fn spring_end_fixed_point_rows() {
        let p = reference();
        let a = Vec3::new(60.0, 0.0, 0.0);
        let mut prob = ShootingProblem::new(
            p,
            Arc::new(UniformLoad(Vec3::zeros())),
            ball(0.0),
            BoundaryJoint::Spring {
                stiffness: 1e4,
                ref_point: a,
            },
        );
        prob.joint_end = BoundaryJoint::Spring {
            stiffness: 1e4,
            ref_point: Vec3::new((1.0 + 100.0 / p.axial_stiffness()) * 50.0, 0.0, 0.0),
        };
        // straight line ending exactly on the spring point: rows reduce to n(L)
        let c = residual(&prob, &Vec3::new(100.0, 0.0, 0.0)).unwrap();
        assert!((c - Vec3::new(100.0, 0.0, 0.0)).amax() < 1e-6);
    }

    #[test]
    fn taut_force_end_residual_vanishes() {
        let p = reference();
        let n0 = Vec3::new(300.0, 0.0, 400.0);
        let prob = ShootingProblem::new(
            p,
            Arc::new(UniformLoad(Vec3::zeros())),
            ball(0.0),
            BoundaryJoint::ImposedForce { force: n0 },
        );
        assert!(residual(&prob, &n0).unwrap().amax() <= 1e-12);
    }

    #[test]
    fn hanging_ball_to_ball_converges() {
        let sol = solve(&hanging(ball(25.0))).unwrap();
        assert!(sol.residual_norm <= 1e-8);
        let end = sol.trajectory.last();
        assert!((end.position - Vec3::new(25.0, 0.0, 0.0)).amax() <= 1e-8);
        // n_z(0) = −ωL/2 by symmetry
        assert!((sol.unknowns_at_start.z + 21.040728345 * 25.0).abs() < 1e-5);
    }

    #[test]
    fn invalid_problem_is_rejected() {
        let mut prob = hanging(ball(25.0));
        prob.newton.tol = 0.0;
        assert!(matches!(solve(&prob), Err(Error::InvalidInput(_))));
    }
}
