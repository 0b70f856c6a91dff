//! Embedded Runge–Kutta–Fehlberg 4(5) integrator with adaptive steps.
//!
//! The fifth-order solution is propagated; the difference between the fourth-
//! and fifth-order solutions, measured in the max-norm without relative
//! scaling, drives the step controller. Positions (m) and tensions (N) share
//! that single absolute tolerance.

use nalgebra::{SVector, Vector6};

use crate::error::{Error, Result};
use crate::model::{state_derivative, DistributedLoad, LineProperties, StateVector};

// Fehlberg's coefficients.
const C: [f64; 6] = [0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0];

const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];

const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];

const GROWTH_CAP: f64 = 5.0;
const SHRINK_FLOOR: f64 = 0.1;

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Bound on the per-step 4th/5th-order difference (max-norm).
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub safety: f64,
    pub max_steps: usize,
}

impl IntegratorSettings {
    /// Defaults for a span of the given length: `abs_tol = 1e-8`,
    /// `h_init = L/100`, `h_min = L·1e-12`, `h_max = L`.
    pub fn for_length(length: f64) -> Self {
        IntegratorSettings {
            abs_tol: 1e-8,
            h_init: length / 100.0,
            h_min: length * 1e-12,
            h_max: length,
            safety: 0.9,
            max_steps: 100_000,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self, span: f64) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.h_min > 0.0
            && self.h_min <= self.h_init
            && self.h_init <= self.h_max
            && self.h_max <= span * (1.0 + 1e-12)
            && self.safety > 0.0
            && self.safety < 1.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "integrator settings {self:?} invalid for span {span}"
            )))
        }
    }
}

/// One Fehlberg step from `(s, y)` with step `h`.
///
/// Returns the fifth-order solution and the max-norm of its difference with
/// the embedded fourth-order solution.
pub fn rkf45_step<const D: usize, F>(rhs: &mut F, s: f64, y: &SVector<f64, D>, h: f64) -> Result<(SVector<f64, D>, f64)>
where
    F: FnMut(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    let mut k = [SVector::<f64, D>::zeros(); 6];
    for stage in 0..6 {
        let mut y_stage = *y;
        for (j, a) in A[stage].iter().enumerate().take(stage) {
            y_stage += k[j] * (h * a);
        }
        if !all_finite(&y_stage) {
            return Err(Error::NonFiniteState { s: s + C[stage] * h });
        }
        k[stage] = rhs(s + C[stage] * h, &y_stage)?;
        if !all_finite(&k[stage]) {
            return Err(Error::NonFiniteState { s: s + C[stage] * h });
        }
    }

    let mut high = *y;
    let mut diff = SVector::<f64, D>::zeros();
    for stage in 0..6 {
        high += k[stage] * (h * B5[stage]);
        diff += k[stage] * (h * (B5[stage] - B4[stage]));
    }
    if !all_finite(&high) {
        return Err(Error::NonFiniteState { s: s + h });
    }
    Ok((high, diff.amax()))
}

fn all_finite<const D: usize>(v: &SVector<f64, D>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Adaptive integration of `dy/ds = rhs(s, y)` from `s0` to `s_end`.
///
/// Every accepted step is recorded; the first sample is `(s0, y0)` and the
/// last sample sits exactly on `s_end`.
pub fn integrate_span<const D: usize, F>(
    mut rhs: F,
    s0: f64,
    s_end: f64,
    y0: SVector<f64, D>,
    settings: &IntegratorSettings,
) -> Result<Vec<(f64, SVector<f64, D>)>>
where
    F: FnMut(f64, &SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    if !(s_end > s0) {
        return Err(Error::invalid(format!("empty span [{s0}, {s_end}]")));
    }
    settings.validate(s_end - s0)?;
    if !all_finite(&y0) {
        return Err(Error::NonFiniteState { s: s0 });
    }

    let mut samples = vec![(s0, y0)];
    let (mut s, mut y) = (s0, y0);
    let mut h = settings.h_init;
    let mut steps = 0usize;

    while s < s_end {
        let remaining = s_end - s;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        steps += 1;
        if steps > settings.max_steps {
            return Err(Error::MaxStepsExceeded {
                s,
                max_steps: settings.max_steps,
            });
        }

        let (y_new, err) = rkf45_step(&mut rhs, s, &y, h)?;
        if err <= settings.abs_tol {
            s = if last { s_end } else { s + h };
            y = y_new;
            samples.push((s, y));
            let factor = if err == 0.0 {
                GROWTH_CAP
            } else {
                (settings.safety * (settings.abs_tol / err).powf(0.2)).clamp(SHRINK_FLOOR, GROWTH_CAP)
            };
            h = (h * factor).clamp(settings.h_min, settings.h_max);
        } else {
            let factor = (settings.safety * (settings.abs_tol / err).powf(0.2)).max(SHRINK_FLOOR);
            let next = h * factor;
            if next < settings.h_min {
                return Err(Error::StepUnderflow {
                    s,
                    h: next,
                    h_min: settings.h_min,
                });
            }
            h = next.min(settings.h_max);
        }
    }
    Ok(samples)
}

/// Ordered `(s, state)` samples produced by an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<(f64, StateVector)>,
}

impl Trajectory {
    /// Builds a trajectory, checking that `s` is strictly increasing.
    pub fn new(samples: Vec<(f64, StateVector)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empty trajectory"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid("trajectory abscissae must increase strictly"));
        }
        Ok(Trajectory { samples })
    }

    pub fn samples(&self) -> &[(f64, StateVector)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &StateVector {
        &self.samples[0].1
    }

    pub fn last(&self) -> &StateVector {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, StateVector)> {
        self.samples.iter()
    }

    pub fn s_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(s, _)| *s)
    }

    /// Cubic Hermite interpolation between accepted samples, with slopes taken
    /// from the ODE right-hand side at each sample.
    pub fn interpolate<F>(&self, s: f64, mut derivative: F) -> Result<StateVector>
    where
        F: FnMut(f64, &StateVector) -> Result<Vector6<f64>>,
    {
        let (s0, s1) = (self.samples[0].0, self.samples[self.len() - 1].0);
        if !(s >= s0 && s <= s1) {
            return Err(Error::invalid(format!("s = {s} outside [{s0}, {s1}]")));
        }
        let i = self.samples.partition_point(|(si, _)| *si <= s);
        if i == 0 || (i == self.len() && self.samples[i - 1].0 == s) {
            return Ok(self.samples[i.saturating_sub(1)].1);
        }
        let (sa, a) = self.samples[i - 1];
        let (sb, b) = self.samples[i];
        let h = sb - sa;
        let t = (s - sa) / h;
        let (ya, yb) = (a.to_vector(), b.to_vector());
        let (da, db) = (derivative(sa, &a)?, derivative(sb, &b)?);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let y = ya * h00 + da * (h * h10) + yb * h01 + db * (h * h11);
        Ok(StateVector::from_vector(&y))
    }
}

/// Integrates a state-vector IVP over `[0, length]`.
pub fn integrate_ivp<F>(
    mut rhs: F,
    state0: StateVector,
    length: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory>
where
    F: FnMut(f64, &StateVector) -> Result<Vector6<f64>>,
{
    let norm = state0.tension.norm();
    if !(norm > 0.0) {
        return Err(Error::SingularTension { norm });
    }
    let raw = integrate_span(
        |s, y: &Vector6<f64>| rhs(s, &StateVector::from_vector(y)),
        0.0,
        length,
        state0.to_vector(),
        settings,
    )?;
    Trajectory::new(
        raw.into_iter()
            .map(|(s, y)| (s, StateVector::from_vector(&y)))
            .collect(),
    )
}

/// Integrates the static string equations from `state0` at `s = 0` to `s = L`.
pub fn integrate_string(
    props: &LineProperties,
    load: &dyn DistributedLoad,
    state0: StateVector,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    integrate_ivp(
        |s, st| state_derivative(st, s, load, props),
        state0,
        props.length,
        settings,
    )
}
