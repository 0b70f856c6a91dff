//! String model: line properties, the elastic constitutive law, distributed
//! loads and the right-hand side of the static equilibrium ODE.
//!
//! The state is `[r, n]`, position and internal tension in global Cartesian
//! coordinates. `n(s)` is the force exerted by the material at `s + ds` on the
//! material at `s`, so along a taut line it points in the direction of
//! increasing `s`.

use nalgebra::{Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Default gravitational acceleration, m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Physical constants of a uniform line segment, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineProperties {
    /// Unstretched length `L`, m.
    pub length: f64,
    /// Young modulus `E`, Pa.
    pub young_modulus: f64,
    /// Cross-section area `A`, m².
    pub cross_area: f64,
    /// Material density, kg/m³.
    pub density_material: f64,
    /// Density of the surrounding fluid, kg/m³.
    pub density_fluid: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

impl LineProperties {
    pub fn new(
        length: f64,
        young_modulus: f64,
        cross_area: f64,
        density_material: f64,
        density_fluid: f64,
    ) -> Result<Self> {
        let props = LineProperties {
            length,
            young_modulus,
            cross_area,
            density_material,
            density_fluid,
            gravity: STANDARD_GRAVITY,
        };
        props.validate()?;
        Ok(props)
    }

    pub fn with_gravity(mut self, gravity: f64) -> Self {
        self.gravity = gravity;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("length", self.length),
            ("young_modulus", self.young_modulus),
            ("cross_area", self.cross_area),
            ("density_material", self.density_material),
            ("density_fluid", self.density_fluid),
            ("gravity", self.gravity),
        ];
        if let Some((name, _)) = all.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
        for (name, v) in &all[..3] {
            if *v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Axial stiffness `EA`, N.
    pub fn axial_stiffness(&self) -> f64 {
        self.young_modulus * self.cross_area
    }

    /// Submerged weight per unit length, N/m. Negative for a buoyant line.
    pub fn relative_weight(&self) -> f64 {
        relative_weight(self)
    }

    /// `ω L`, the submerged weight of the whole segment.
    pub fn total_weight(&self) -> f64 {
        self.relative_weight() * self.length
    }
}

/// `g A (ρ − ρ_f)`.
pub fn relative_weight(props: &LineProperties) -> f64 {
    props.gravity * props.cross_area * (props.density_material - props.density_fluid)
}

/// Elastic stretch `1 + |n| / EA`.
pub fn stretch_factor(tension_norm: f64, ea: f64) -> Result<f64> {
    if !(tension_norm > 0.0) {
        return Err(Error::SingularTension { norm: tension_norm });
    }
    Ok(1.0 + tension_norm / ea)
}

/// Direction of the curvilinear abscissa relative to global `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Convention {
    /// `s` grows along `+x`.
    I,
    /// `s` grows along `-x`.
    II,
}

impl Convention {
    /// `+1` for (I), `-1` for (II).
    pub fn sign(self) -> f64 {
        match self {
            Convention::I => 1.0,
            Convention::II => -1.0,
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::I => f.write_str("I"),
            Convention::II => f.write_str("II"),
        }
    }
}

/// Position and internal tension at one material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub position: Vec3,
    pub tension: Vec3,
}

impl StateVector {
    pub fn new(position: Vec3, tension: Vec3) -> Self {
        StateVector { position, tension }
    }

    /// Components in the fixed order `x, y, z, n_x, n_y, n_z`.
    pub fn to_vector(&self) -> Vector6<f64> {
        let (r, n) = (&self.position, &self.tension);
        Vector6::new(r.x, r.y, r.z, n.x, n.y, n.z)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        StateVector {
            position: Vec3::new(v[0], v[1], v[2]),
            tension: Vec3::new(v[3], v[4], v[5]),
        }
    }

    pub fn component(&self, index: usize) -> f64 {
        if index < 3 {
            self.position[index]
        } else {
            self.tension[index - 3]
        }
    }

    pub fn set_component(&mut self, index: usize, value: f64) {
        if index < 3 {
            self.position[index] = value;
        } else {
            self.tension[index - 3] = value;
        }
    }
}

/// Force per unit length acting on the line, N/m, in global coordinates.
///
/// Loads see both the abscissa and the current position so shape-dependent
/// loads (current drag, for instance) can be expressed; they must be finite
/// and deterministic on `[0, L]`.
pub trait DistributedLoad: Send + Sync {
    fn force(&self, s: f64, position: &Vec3) -> Vec3;
}

impl<F> DistributedLoad for F
where
    F: Fn(f64, &Vec3) -> Vec3 + Send + Sync,
{
    fn force(&self, s: f64, position: &Vec3) -> Vec3 {
        self(s, position)
    }
}

/// Uniform load, constant in `s` and in shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformLoad(pub Vec3);

impl DistributedLoad for UniformLoad {
    fn force(&self, _s: f64, _position: &Vec3) -> Vec3 {
        self.0
    }
}

/// Submerged weight: `(0, 0, −ω)` everywhere.
pub fn buoyant_weight_load(props: &LineProperties) -> UniformLoad {
    UniformLoad(Vec3::new(0.0, 0.0, -props.relative_weight()))
}

/// Piecewise-constant load over consecutive abscissa intervals.
///
/// Each segment applies on `[start, end)`; abscissae outside every segment
/// get zero load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantLoad {
    pub segments: Vec<LoadSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSegment {
    pub start: f64,
    pub end: f64,
    pub force: [f64; 3],
}

impl PiecewiseConstantLoad {
    pub fn new(segments: Vec<LoadSegment>) -> Result<Self> {
        for seg in &segments {
            let finite = seg.start.is_finite() && seg.end.is_finite() && seg.force.iter().all(|f| f.is_finite());
            if !finite || seg.end <= seg.start {
                return Err(Error::invalid(format!("bad load segment [{}, {})", seg.start, seg.end)));
            }
        }
        Ok(PiecewiseConstantLoad { segments })
    }
}

impl DistributedLoad for PiecewiseConstantLoad {
    fn force(&self, s: f64, _position: &Vec3) -> Vec3 {
        self.segments
            .iter()
            .find(|seg| s >= seg.start && s < seg.end)
            .or_else(|| self.segments.iter().find(|seg| s == seg.end))
            .map(|seg| Vec3::from(seg.force))
            .unwrap_or_else(Vec3::zeros)
    }
}

/// Right-hand side of the static string equations:
/// `dr/ds = (1 + |n|/EA) n/|n|`, `dn/ds = −f(s, r)`.
pub fn state_derivative(
    state: &StateVector,
    s: f64,
    load: &dyn DistributedLoad,
    props: &LineProperties,
) -> Result<Vector6<f64>> {
    let norm = state.tension.norm();
    let stretch = stretch_factor(norm, props.axial_stiffness())?;
    let dr = state.tension * (stretch / norm);
    let dn = -load.force(s, &state.position);
    Ok(Vector6::new(dr.x, dr.y, dr.z, dn.x, dn.y, dn.z))
}
