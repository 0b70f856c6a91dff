//! Elastic catenary reference solution.
//!
//! For a uniform line loaded by its submerged weight only, the string
//! equations integrate in closed form. With the local abscissa frame `X`
//! along the horizontal direction of increasing `s`:
//!
//! ```text
//! X(s) = N_x0/ω [asinh((N_z0 + ωs)/N_x0) − asinh(N_z0/N_x0)] + N_x0 s/EA
//! Z(s) = N_x0/ω [√(1 + ((N_z0 + ωs)/N_x0)²) − √(1 + (N_z0/N_x0)²)]
//!        + (N_z0 s + ωs²/2)/EA
//! N_x(s) = N_x0,  N_z(s) = N_z0 + ωs
//! ```
//!
//! Global fields follow from the start point `(x_A, z_A)` and the
//! [`Convention`]: `x = x_A ± X`, `z = z_A + Z`, `n_x = ±N_x`, `n_z = N_z`.
//!
//! The two boundary joints leave a 2×2 algebraic system in two of
//! `N_x0, N_z0, x_A, z_A`, solved here by a damped Newton iteration.

use nalgebra::{Vector2, Vector6};

use crate::error::{Error, Result};
use crate::model::{Convention, LineProperties, StateVector, Vec3};
use crate::shoot::newton::{fd_jacobian, solve_dense};
use crate::shoot::BoundaryJoint;

/// Relative step between two iterates at which the 2×2 solve stops.
pub const STEP_TOL: f64 = 1e-12;
/// Residual bound after convergence, relative to `max(|ω|L, 1)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 40;

/// The four quantities that fix a catenary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenaryParameters {
    /// Local horizontal tension, constant along the line. Must be positive.
    pub n_x0: f64,
    /// Local vertical tension at `s = 0`.
    pub n_z0: f64,
    pub x_a: f64,
    pub z_a: f64,
    pub convention: Convention,
}

/// Global fields at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenaryPoint {
    pub x: f64,
    pub z: f64,
    pub n_x: f64,
    pub n_z: f64,
}

impl CatenaryPoint {
    /// The point as a planar 3D state (`y = n_y = 0`).
    pub fn to_state(&self) -> StateVector {
        StateVector::new(Vec3::new(self.x, 0.0, self.z), Vec3::new(self.n_x, 0.0, self.n_z))
    }
}

/// Local shape `(X(s), Z(s))`.
///
/// A weightless line is a straight taut segment:
/// `(X, Z) = (N_x0, N_z0) s (1/|N| + 1/EA)`.
pub fn local_shape(s: f64, params: &CatenaryParameters, props: &LineProperties) -> Result<(f64, f64)> {
    let (h, v0) = (params.n_x0, params.n_z0);
    if !(h > 0.0) {
        return Err(Error::ZeroHorizontalTension);
    }
    let w = props.relative_weight();
    let ea = props.axial_stiffness();

    if w == 0.0 {
        let scale = s * (1.0 / h.hypot(v0) + 1.0 / ea);
        return Ok((h * scale, v0 * scale));
    }

    let a0 = v0 / h;
    let a1 = (v0 + w * s) / h;
    let x = h / w * (a1.asinh() - a0.asinh()) + h * s / ea;
    let z = h / w * ((1.0 + a1 * a1).sqrt() - (1.0 + a0 * a0).sqrt()) + (v0 * s + 0.5 * w * s * s) / ea;
    Ok((x, z))
}

/// Local tensions `(N_x(s), N_z(s))`.
pub fn local_tension(s: f64, params: &CatenaryParameters, props: &LineProperties) -> (f64, f64) {
    (params.n_x0, params.n_z0 + props.relative_weight() * s)
}

pub fn to_global(s: f64, params: &CatenaryParameters, props: &LineProperties) -> Result<CatenaryPoint> {
    let (big_x, big_z) = local_shape(s, params, props)?;
    let (nx, nz) = local_tension(s, params, props);
    let sign = params.convention.sign();
    Ok(CatenaryPoint {
        x: params.x_a + sign * big_x,
        z: params.z_a + big_z,
        n_x: sign * nx,
        n_z: nz,
    })
}

/// In-plane joint seen by the catenary reference. Forces are the forces the
/// joint applies to the line, in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarJoint {
    /// Ball joint at `(x, z)`.
    Ball { x: f64, z: f64 },
    /// Constant force `(f_x, f_z)`.
    Force { fx: f64, fz: f64 },
    /// Spring of stiffness `k` towards `(a_x, a_z)`.
    Spring { k: f64, ax: f64, az: f64 },
    /// Horizontal slider at height `z` with axial force `f_x`.
    Slider { fx: f64, z: f64 },
    /// Horizontal slider at height `z` with an axial spring towards `a_x`.
    SpringSlider { k: f64, ax: f64, z: f64 },
}

impl PlanarJoint {
    /// In-plane counterpart of a 3D joint, if there is one.
    pub fn from_boundary(joint: &BoundaryJoint) -> Result<Self> {
        let planar = |v: &Vec3, what: &str| {
            if v.y == 0.0 {
                Ok(())
            } else {
                Err(Error::NoReference(format!("{what} leaves the x–z plane")))
            }
        };
        let along_x = |axis: &Vec3| {
            if axis.x.abs() == 1.0 && axis.y == 0.0 && axis.z == 0.0 {
                Ok(axis.x)
            } else {
                Err(Error::NoReference("slider axis must be the x axis".into()))
            }
        };
        match joint {
            BoundaryJoint::Spherical { anchor } => {
                planar(anchor, "anchor")?;
                Ok(PlanarJoint::Ball {
                    x: anchor.x,
                    z: anchor.z,
                })
            }
            BoundaryJoint::ImposedForce { force } => {
                planar(force, "force")?;
                Ok(PlanarJoint::Force {
                    fx: force.x,
                    fz: force.z,
                })
            }
            BoundaryJoint::Spring { stiffness, ref_point } => {
                planar(ref_point, "spring point")?;
                Ok(PlanarJoint::Spring {
                    k: *stiffness,
                    ax: ref_point.x,
                    az: ref_point.z,
                })
            }
            BoundaryJoint::LinearAnnular {
                axis,
                axial_force,
                transverse_position,
            } => {
                let dir = along_x(axis)?;
                if transverse_position[0] != 0.0 {
                    return Err(Error::NoReference("slider leaves the x–z plane".into()));
                }
                Ok(PlanarJoint::Slider {
                    fx: dir * axial_force,
                    z: transverse_position[1],
                })
            }
            BoundaryJoint::SpringLinearAnnular {
                axis,
                stiffness,
                ref_point,
                transverse_position,
            } => {
                along_x(axis)?;
                if transverse_position[0] != 0.0 {
                    return Err(Error::NoReference("slider leaves the x–z plane".into()));
                }
                Ok(PlanarJoint::SpringSlider {
                    k: *stiffness,
                    ax: ref_point.x,
                    z: transverse_position[1],
                })
            }
            BoundaryJoint::Punctual { .. } => {
                Err(Error::NoReference("punctual joints have no catenary reference".into()))
            }
        }
    }
}

/// A catenary configuration: line, joints at `s = 0` and `s = L`, and the
/// direction of `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenaryCase {
    pub props: LineProperties,
    pub convention: Convention,
    pub start: PlanarJoint,
    pub end: PlanarJoint,
    /// Tension guess ratio `c = ωL/|n|`.
    pub guess_c: f64,
    /// Guess for an unknown start point `(x_A, z_A)`.
    pub guess_position: Option<(f64, f64)>,
}

impl CatenaryCase {
    pub fn new(props: LineProperties, convention: Convention, start: PlanarJoint, end: PlanarJoint) -> Self {
        CatenaryCase {
            props,
            convention,
            start,
            end,
            guess_c: 10.0,
            guess_position: None,
        }
    }

    /// Completes the parameters from the two unknowns of the start joint:
    /// `(N_x0, N_z0)` for a ball, `(x_A, z_A)` for force and spring joints,
    /// `(x_A, N_z0)` for sliders.
    pub fn parameters(&self, unknowns: &Vector2<f64>) -> CatenaryParameters {
        let sign = self.convention.sign();
        let (u, v) = (unknowns[0], unknowns[1]);
        // n(0) = −F at the start end, and N_x0 = ± n_x(0).
        let (n_x0, n_z0, x_a, z_a) = match self.start {
            PlanarJoint::Ball { x, z } => (u, v, x, z),
            PlanarJoint::Force { fx, fz } => (-sign * fx, -fz, u, v),
            PlanarJoint::Spring { k, ax, az } => (-sign * k * (ax - u), -k * (az - v), u, v),
            PlanarJoint::Slider { fx, z } => (-sign * fx, v, u, z),
            PlanarJoint::SpringSlider { k, ax, z } => (-sign * k * (ax - u), v, u, z),
        };
        CatenaryParameters {
            n_x0,
            n_z0,
            x_a,
            z_a,
            convention: self.convention,
        }
    }

    /// The two unknowns that produce `params`.
    pub fn unknowns(&self, params: &CatenaryParameters) -> Vector2<f64> {
        match self.start {
            PlanarJoint::Ball { .. } => Vector2::new(params.n_x0, params.n_z0),
            PlanarJoint::Force { .. } | PlanarJoint::Spring { .. } => Vector2::new(params.x_a, params.z_a),
            PlanarJoint::Slider { .. } | PlanarJoint::SpringSlider { .. } => Vector2::new(params.x_a, params.n_z0),
        }
    }

    fn unknown_scales(&self) -> Vector2<f64> {
        let t = self.props.total_weight().abs().max(1.0);
        match self.start {
            PlanarJoint::Ball { .. } => Vector2::new(t, t),
            PlanarJoint::Force { .. } | PlanarJoint::Spring { .. } => Vector2::new(1.0, 1.0),
            PlanarJoint::Slider { .. } | PlanarJoint::SpringSlider { .. } => Vector2::new(1.0, t),
        }
    }

    /// First iterate: the start tension points towards the other end and
    /// along the weight with `|n_x| = |n_z| = |ω|L/(c√2)`; start springs are
    /// shifted by `n/k` from the position guess so they deliver that tension.
    pub fn initial_unknowns(&self) -> Vector2<f64> {
        let sign = self.convention.sign();
        let w = self.props.total_weight();
        let m = if w != 0.0 {
            w.abs() / (self.guess_c * std::f64::consts::SQRT_2)
        } else {
            1e-6 * self.props.axial_stiffness()
        };
        let n_z = -w.signum() * m;

        let end_x = match self.end {
            PlanarJoint::Ball { x, .. } => Some(x),
            PlanarJoint::Spring { ax, .. } | PlanarJoint::SpringSlider { ax, .. } => Some(ax),
            _ => None,
        };
        let start_x = match self.start {
            PlanarJoint::Ball { x, .. } => Some(x),
            PlanarJoint::Spring { ax, .. } | PlanarJoint::SpringSlider { ax, .. } => Some(ax),
            _ => self.guess_position.map(|p| p.0),
        };
        let toward = match (start_x, end_x) {
            (Some(a), Some(b)) if a != b => (b - a).signum(),
            _ => sign,
        };
        let n_x = toward * m;
        // local horizontal tension is positive along the direction of s
        let n_x0 = (sign * n_x).abs();

        let (gx, gz) = self.guess_position.unwrap_or(match self.end {
            PlanarJoint::Ball { x, z } => (x, z),
            PlanarJoint::Spring { ax, az, .. } => (ax, az),
            PlanarJoint::SpringSlider { ax, z, .. } => (ax, z),
            PlanarJoint::Slider { z, .. } => (0.0, z),
            PlanarJoint::Force { .. } => (0.0, 0.0),
        });
        match self.start {
            PlanarJoint::Ball { .. } => Vector2::new(n_x0, n_z),
            PlanarJoint::Force { .. } => Vector2::new(gx, gz),
            PlanarJoint::Slider { .. } => Vector2::new(gx, n_z),
            PlanarJoint::Spring { k, ax, az } => {
                let (px, pz) = self.guess_position.unwrap_or((ax, az));
                Vector2::new(px + n_x / k, pz + n_z / k)
            }
            PlanarJoint::SpringSlider { k, ax, .. } => {
                let px = self.guess_position.map_or(ax, |p| p.0);
                Vector2::new(px + n_x / k, n_z)
            }
        }
    }
}

/// The two end-joint constraints at `s = L`, in global fields.
pub fn case_constraints(case: &CatenaryCase, params: &CatenaryParameters) -> Result<Vector2<f64>> {
    let end = to_global(case.props.length, params, &case.props)?;
    Ok(match case.end {
        PlanarJoint::Ball { x, z } => Vector2::new(end.x - x, end.z - z),
        PlanarJoint::Force { fx, fz } => Vector2::new(end.n_x - fx, end.n_z - fz),
        PlanarJoint::Spring { k, ax, az } => Vector2::new(end.n_x - k * (ax - end.x), end.n_z - k * (az - end.z)),
        PlanarJoint::Slider { fx, z } => Vector2::new(end.n_x - fx, end.z - z),
        PlanarJoint::SpringSlider { k, ax, z } => Vector2::new(end.n_x - k * (ax - end.x), end.z - z),
    })
}

/// Converged reference with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenarySolution {
    pub params: CatenaryParameters,
    pub residual: Vector2<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Relative size of the last Newton step.
    pub last_relative_step: f64,
}

impl CatenarySolution {
    pub fn at(&self, s: f64, props: &LineProperties) -> Result<CatenaryPoint> {
        to_global(s, &self.params, props)
    }
}

/// Solves the 2×2 system of a catenary case by damped Newton iteration.
///
/// Iterates stop once the relative step falls to [`STEP_TOL`]; the residual
/// must then lie within `RESIDUAL_TOL · max(|ω|L, 1)`. Trial points with a
/// non-positive horizontal tension are rejected by halving the step.
pub fn semi_analytic_solve(case: &CatenaryCase) -> Result<CatenarySolution> {
    case.props.validate()?;
    let scales = case.unknown_scales();
    let bound = RESIDUAL_TOL * case.props.total_weight().abs().max(1.0);
    let mut eval = |u: &Vector2<f64>| case_constraints(case, &case.parameters(u));

    let mut u = case.initial_unknowns();
    let mut c = eval(&u)?;
    let mut norm = c.amax();
    let mut last_rel = f64::INFINITY;

    for iteration in 1..=MAX_ITER {
        let jac = fd_jacobian(&mut eval, &u, &c, &scales, f64::EPSILON.sqrt())?;
        let step = solve_dense(&jac, &(-c)).map_err(|(pivot, jnorm)| Error::SingularJacobian {
            iteration,
            pivot,
            norm: jnorm,
        })?;
        let rel = (0..2)
            .map(|i| step[i].abs() / u[i].abs().max(scales[i]))
            .fold(0.0, f64::max);

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = u + step * scale;
            if let Ok(ct) = eval(&trial) {
                let n = ct.amax();
                if n.is_finite() && (n < norm || rel <= STEP_TOL) {
                    accepted = Some((trial, ct, n));
                    break;
                }
            }
            scale *= 0.5;
        }

        match accepted {
            Some((next, c_next, n)) => {
                last_rel = rel * scale;
                u = next;
                c = c_next;
                norm = n;
            }
            // No further decrease available: the residual sits at round-off.
            None if norm <= bound => {
                last_rel = 0.0;
                break;
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual_norm: norm,
                    trace: vec![norm],
                })
            }
        }
        if last_rel <= STEP_TOL {
            if norm > bound {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual_norm: norm,
                    trace: vec![norm],
                });
            }
            return Ok(CatenarySolution {
                params: case.parameters(&u),
                residual: c,
                residual_norm: norm,
                iterations: iteration,
                last_relative_step: last_rel,
            });
        }
    }
    if norm <= bound && last_rel == 0.0 {
        return Ok(CatenarySolution {
            params: case.parameters(&u),
            residual: c,
            residual_norm: norm,
            iterations: MAX_ITER,
            last_relative_step: last_rel,
        });
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        residual_norm: norm,
        trace: vec![norm],
    })
}

/// Derivative of the planar state with respect to `s` by central differences.
/// Test helper for checking the closed form against the ODE.
pub fn central_difference(s: f64, h: f64, params: &CatenaryParameters, props: &LineProperties) -> Result<Vector6<f64>> {
    let a = to_global(s - h, params, props)?.to_state().to_vector();
    let b = to_global(s + h, params, props)?.to_state().to_vector();
    Ok((b - a) / (2.0 * h))
}
