//! Boundary joints and the split of the state vector into constrained and
//! unknown components at each end.
//!
//! Each of the three translational directions at an end is either
//! position-constrained (the joint blocks the motion, the reaction force is
//! free) or force-constrained (the motion is free, the force is imposed as a
//! constant or as a function of position). Never both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{StateVector, Vec3};

/// State component indices, in the fixed order used everywhere in the crate.
pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const NX: usize = 3;
pub const NY: usize = 4;
pub const NZ: usize = 5;

pub const COMPONENT_NAMES: [&str; 6] = ["x", "y", "z", "n_x", "n_y", "n_z"];

const UNIT_TOL: f64 = 1e-12;

/// Mechanical linkage at one end of the line.
///
/// Forces are the forces the joint applies to the line; the sign flip needed
/// at `s = 0` is applied by [`boundary_force`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryJoint {
    /// Ball joint pinned at `anchor`.
    Spherical { anchor: Vec3 },
    /// Free end loaded by a constant force.
    ImposedForce { force: Vec3 },
    /// Free end tied to `ref_point` by an isotropic spring.
    Spring { stiffness: f64, ref_point: Vec3 },
    /// Slider along a global axis with a constant axial force; the two
    /// transverse coordinates (ascending component order) are fixed.
    LinearAnnular {
        axis: Vec3,
        axial_force: f64,
        transverse_position: [f64; 2],
    },
    /// Slider along a global axis restrained by an axial spring towards
    /// `ref_point`.
    SpringLinearAnnular {
        axis: Vec3,
        stiffness: f64,
        ref_point: Vec3,
        transverse_position: [f64; 2],
    },
    /// Plane contact: the coordinate along `normal` is fixed at
    /// `normal_position`, the in-plane forces (ascending component order) are
    /// imposed.
    Punctual {
        normal: Vec3,
        normal_position: f64,
        in_plane_force: [f64; 2],
    },
}

/// Which end of the abscissa interval a joint sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Start,
    End,
}

impl End {
    /// Sign applied to joint forces: `n(0) = −F`, `n(L) = +F`.
    pub fn sigma(self) -> f64 {
        match self {
            End::Start => -1.0,
            End::End => 1.0,
        }
    }
}

/// Constrained and unknown state components at one end, each sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub constrained: [usize; 3],
    pub unknown: [usize; 3],
}

impl Partition {
    fn from_position_mask(position_constrained: [bool; 3]) -> Self {
        let mut constrained = Vec::with_capacity(3);
        let mut unknown = Vec::with_capacity(3);
        for (i, &fixed) in position_constrained.iter().enumerate() {
            if fixed {
                constrained.push(i);
                unknown.push(i + 3);
            } else {
                constrained.push(i + 3);
                unknown.push(i);
            }
        }
        constrained.sort_unstable();
        unknown.sort_unstable();
        Partition {
            constrained: [constrained[0], constrained[1], constrained[2]],
            unknown: [unknown[0], unknown[1], unknown[2]],
        }
    }

    pub fn is_constrained(&self, component: usize) -> bool {
        self.constrained.contains(&component)
    }
}

/// Index of the global axis `v` is aligned with.
pub fn axis_index(v: &Vec3) -> Result<usize> {
    if !v.iter().all(|c| c.is_finite()) || (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("axis {:?} is not a unit vector", v.as_slice())));
    }
    let aligned: Vec<usize> = (0..3).filter(|&i| v[i].abs() > UNIT_TOL).collect();
    match aligned.as_slice() {
        [i] => Ok(*i),
        _ => Err(Error::NonAxisAligned { axis: [v.x, v.y, v.z] }),
    }
}

fn others(i: usize) -> [usize; 2] {
    match i {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

impl BoundaryJoint {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        let ok = match self {
            BoundaryJoint::Spherical { anchor } => finite(anchor),
            BoundaryJoint::ImposedForce { force } => finite(force),
            BoundaryJoint::Spring { stiffness, ref_point } => finite(ref_point) && stiffness.is_finite(),
            BoundaryJoint::LinearAnnular {
                axial_force,
                transverse_position,
                ..
            } => axial_force.is_finite() && transverse_position.iter().all(|c| c.is_finite()),
            BoundaryJoint::SpringLinearAnnular {
                stiffness,
                ref_point,
                transverse_position,
                ..
            } => stiffness.is_finite() && finite(ref_point) && transverse_position.iter().all(|c| c.is_finite()),
            BoundaryJoint::Punctual {
                normal_position,
                in_plane_force,
                ..
            } => normal_position.is_finite() && in_plane_force.iter().all(|c| c.is_finite()),
        };
        if !ok {
            return Err(Error::invalid(format!("non-finite value in joint {self:?}")));
        }
        if let Some(k) = self.stiffness() {
            if k <= 0.0 {
                return Err(Error::invalid(format!("spring stiffness must be positive, got {k}")));
            }
        }
        self.partition().map(|_| ())
    }

    pub fn stiffness(&self) -> Option<f64> {
        match self {
            BoundaryJoint::Spring { stiffness, .. } | BoundaryJoint::SpringLinearAnnular { stiffness, .. } => {
                Some(*stiffness)
            }
            _ => None,
        }
    }

    /// Position-constrained and force-constrained components of this joint.
    pub fn partition(&self) -> Result<Partition> {
        let mask = match self {
            BoundaryJoint::Spherical { .. } => [true; 3],
            BoundaryJoint::ImposedForce { .. } | BoundaryJoint::Spring { .. } => [false; 3],
            BoundaryJoint::LinearAnnular { axis, .. } | BoundaryJoint::SpringLinearAnnular { axis, .. } => {
                let i = axis_index(axis)?;
                let mut m = [true; 3];
                m[i] = false;
                m
            }
            BoundaryJoint::Punctual { normal, .. } => {
                let i = axis_index(normal)?;
                let mut m = [false; 3];
                m[i] = true;
                m
            }
        };
        Ok(Partition::from_position_mask(mask))
    }

    /// Imposed coordinates, per axis.
    pub fn position_targets(&self) -> Result<[Option<f64>; 3]> {
        let mut out = [None; 3];
        match self {
            BoundaryJoint::Spherical { anchor } => {
                for i in 0..3 {
                    out[i] = Some(anchor[i]);
                }
            }
            BoundaryJoint::ImposedForce { .. } | BoundaryJoint::Spring { .. } => {}
            BoundaryJoint::LinearAnnular {
                axis,
                transverse_position,
                ..
            }
            | BoundaryJoint::SpringLinearAnnular {
                axis,
                transverse_position,
                ..
            } => {
                let i = axis_index(axis)?;
                for (j, value) in others(i).into_iter().zip(transverse_position) {
                    out[j] = Some(*value);
                }
            }
            BoundaryJoint::Punctual {
                normal,
                normal_position,
                ..
            } => out[axis_index(normal)?] = Some(*normal_position),
        }
        Ok(out)
    }

    /// A point the joint is attached to, per axis: imposed coordinates and
    /// spring reference coordinates. Used to build first guesses.
    pub fn reference_position(&self) -> Result<[Option<f64>; 3]> {
        let mut out = self.position_targets()?;
        match self {
            BoundaryJoint::Spring { ref_point, .. } => {
                for i in 0..3 {
                    out[i] = Some(ref_point[i]);
                }
            }
            BoundaryJoint::SpringLinearAnnular { axis, ref_point, .. } => {
                let i = axis_index(axis)?;
                out[i] = Some(ref_point[i]);
            }
            _ => {}
        }
        Ok(out)
    }
}

/// Tension components imposed by `joint` at the given end when the end sits
/// at `r`: `σ F_i` for constant forces, `σ k (p − r)·i` for springs, with
/// `σ = −1` at `s = 0` and `+1` at `s = L`. Position-constrained axes are
/// `None`.
pub fn boundary_force(joint: &BoundaryJoint, r: &Vec3, end: End) -> Result<[Option<f64>; 3]> {
    let sigma = end.sigma();
    let mut out = [None; 3];
    match joint {
        BoundaryJoint::Spherical { .. } => {}
        BoundaryJoint::ImposedForce { force } => {
            for i in 0..3 {
                out[i] = Some(sigma * force[i]);
            }
        }
        BoundaryJoint::Spring { stiffness, ref_point } => {
            for i in 0..3 {
                out[i] = Some(sigma * stiffness * (ref_point[i] - r[i]));
            }
        }
        BoundaryJoint::LinearAnnular { axis, axial_force, .. } => {
            let i = axis_index(axis)?;
            out[i] = Some(sigma * axial_force * axis[i]);
        }
        BoundaryJoint::SpringLinearAnnular {
            axis,
            stiffness,
            ref_point,
            ..
        } => {
            let i = axis_index(axis)?;
            out[i] = Some(sigma * stiffness * (ref_point[i] - r[i]));
        }
        BoundaryJoint::Punctual {
            normal, in_plane_force, ..
        } => {
            let i = axis_index(normal)?;
            for (j, f) in others(i).into_iter().zip(in_plane_force) {
                out[j] = Some(sigma * f);
            }
        }
    }
    Ok(out)
}

/// Full state at `s = 0` from the start joint and the three Newton unknowns
/// (ascending component order). Positions are placed first so that
/// position-dependent forces see the assembled coordinates.
pub fn assemble_initial_state(joint: &BoundaryJoint, unknowns: &Vec3) -> Result<StateVector> {
    let partition = joint.partition()?;
    let mut state = StateVector::new(Vec3::zeros(), Vec3::zeros());
    for (i, target) in joint.position_targets()?.into_iter().enumerate() {
        if let Some(v) = target {
            state.position[i] = v;
        }
    }
    for (k, &component) in partition.unknown.iter().enumerate() {
        state.set_component(component, unknowns[k]);
    }
    for (i, force) in boundary_force(joint, &state.position, End::Start)?
        .into_iter()
        .enumerate()
    {
        if let Some(f) = force {
            state.tension[i] = f;
        }
    }
    let norm = state.tension.norm();
    if !(norm > 0.0) {
        return Err(Error::SingularTension { norm });
    }
    Ok(state)
}

/// Residual of the end joint's three constraints against the state at `s = L`,
/// in ascending component order.
pub fn end_constraints(joint: &BoundaryJoint, end_state: &StateVector) -> Result<Vec3> {
    let partition = joint.partition()?;
    let positions = joint.position_targets()?;
    let forces = boundary_force(joint, &end_state.position, End::End)?;
    let mut c = Vec3::zeros();
    for (k, &component) in partition.constrained.iter().enumerate() {
        let target = if component < 3 {
            positions[component]
        } else {
            forces[component - 3]
        };
        let target = target.expect("partition and targets agree");
        c[k] = end_state.component(component) - target;
    }
    Ok(c)
}
