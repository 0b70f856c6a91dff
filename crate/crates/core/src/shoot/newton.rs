//! Newton–Raphson with forward-difference Jacobians for small dense systems.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a Jacobian is treated as singular.
pub const SINGULAR_PIVOT: f64 = 1e-14;
/// Updates smaller than this many ulps of the iterate cannot improve it.
const ROUNDOFF_STEP: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Stop when `‖C‖∞ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step.
    pub fd_step_scale: f64,
    /// Step halvings tried when a trial point cannot be evaluated.
    pub max_halvings: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tol: 1e-8,
            max_iter: 50,
            fd_step_scale: f64::EPSILON.sqrt(),
            max_halvings: 20,
        }
    }
}

impl NewtonSettings {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.fd_step_scale > 0.0) {
            return Err(Error::invalid(format!("invalid Newton settings {self:?}")));
        }
        Ok(())
    }
}

/// Converged root and how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport<const D: usize> {
    pub root: SVector<f64, D>,
    pub residual: SVector<f64, D>,
    pub iterations: usize,
    pub residual_norm: f64,
    /// `‖C‖∞` at the initial guess and after every update.
    pub trace: Vec<f64>,
    /// The iteration stopped above `tol` because the Newton update had shrunk
    /// below the floating-point resolution of the iterate.
    pub roundoff_limited: bool,
}

/// Forward-difference Jacobian of `f` at `u`, given `f(u) = c0`.
///
/// Column `j` uses the step `h_j = step_scale · max(|u_j|, typical_j)`.
pub fn fd_jacobian<const D: usize, F>(
    f: &mut F,
    u: &SVector<f64, D>,
    c0: &SVector<f64, D>,
    typical: &SVector<f64, D>,
    step_scale: f64,
) -> Result<SMatrix<f64, D, D>>
where
    F: FnMut(&SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    let mut jac = SMatrix::<f64, D, D>::zeros();
    for j in 0..D {
        let mut shifted = *u;
        shifted[j] += step_scale * u[j].abs().max(typical[j].abs());
        // The step actually taken, after rounding.
        let h = shifted[j] - u[j];
        let c = f(&shifted)?;
        jac.set_column(j, &((c - c0) / h));
    }
    Ok(jac)
}

/// Solves `J x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with the offending pivot when it falls below
/// `SINGULAR_PIVOT · ‖J‖∞`.
pub fn solve_dense<const D: usize>(
    jac: &SMatrix<f64, D, D>,
    rhs: &SVector<f64, D>,
) -> std::result::Result<SVector<f64, D>, (f64, f64)> {
    let norm = (0..D)
        .map(|i| jac.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut a = *jac;
    let mut b = *rhs;
    for col in 0..D {
        let pivot_row = (col..D)
            .max_by(|&p, &q| a[(p, col)].abs().total_cmp(&a[(q, col)].abs()))
            .unwrap_or(col);
        let pivot = a[(pivot_row, col)];
        if !(pivot.abs() > SINGULAR_PIVOT * norm) {
            return Err((pivot.abs(), norm));
        }
        a.swap_rows(col, pivot_row);
        b.swap_rows(col, pivot_row);
        for row in col + 1..D {
            let factor = a[(row, col)] / pivot;
            for k in col..D {
                a[(row, k)] -= factor * a[(col, k)];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = SVector::<f64, D>::zeros();
    for row in (0..D).rev() {
        let tail: f64 = (row + 1..D).map(|k| a[(row, k)] * x[k]).sum();
        x[row] = (b[row] - tail) / a[(row, row)];
    }
    Ok(x)
}

fn inf_norm<const D: usize>(v: &SVector<f64, D>) -> f64 {
    if v.iter().all(|x| x.is_finite()) {
        v.amax()
    } else {
        f64::INFINITY
    }
}

/// Plain Newton iteration `u ← u − J⁻¹ C(u)` until `‖C‖∞ ≤ tol`, or until
/// the update is below round-off (`|Δu_j| ≤ 4ε·max(|u_j|, typical_j)`), at
/// which point the residual is as small as the arithmetic allows.
///
/// Full steps are taken. When the trial point cannot be evaluated (the
/// integration fails, or the residual is not finite) the step is halved, up
/// to `max_halvings` times.
pub fn newton_solve<const D: usize, F>(
    mut f: F,
    u0: SVector<f64, D>,
    typical: SVector<f64, D>,
    settings: &NewtonSettings,
) -> Result<NewtonReport<D>>
where
    F: FnMut(&SVector<f64, D>) -> Result<SVector<f64, D>>,
{
    settings.validate()?;
    let evaluation_failed = |iteration: usize, e: Error| Error::EvaluationFailed {
        iteration,
        source: Box::new(e),
    };

    let mut u = u0;
    let mut c = f(&u).map_err(|e| evaluation_failed(0, e))?;
    let mut norm = inf_norm(&c);
    if !norm.is_finite() {
        return Err(evaluation_failed(0, Error::NonFiniteState { s: f64::NAN }));
    }
    let mut trace = vec![norm];

    for iteration in 1..=settings.max_iter {
        if norm <= settings.tol {
            return Ok(NewtonReport {
                root: u,
                residual: c,
                iterations: iteration - 1,
                residual_norm: norm,
                trace,
                roundoff_limited: false,
            });
        }
        let jac = fd_jacobian(&mut f, &u, &c, &typical, settings.fd_step_scale)
            .map_err(|e| evaluation_failed(iteration, e))?;
        let step = solve_dense(&jac, &(-c)).map_err(|(pivot, jnorm)| Error::SingularJacobian {
            iteration,
            pivot,
            norm: jnorm,
        })?;
        let negligible = (0..D).all(|j| step[j].abs() <= ROUNDOFF_STEP * u[j].abs().max(typical[j].abs()));
        if negligible {
            return Ok(NewtonReport {
                root: u,
                residual: c,
                iterations: iteration - 1,
                residual_norm: norm,
                trace,
                roundoff_limited: true,
            });
        }

        let mut scale = 1.0;
        let mut accepted = None;
        let mut failure = Error::NonFiniteState { s: f64::NAN };
        for _ in 0..=settings.max_halvings {
            let trial = u + step * scale;
            match f(&trial) {
                Ok(ct) if inf_norm(&ct).is_finite() => {
                    accepted = Some((trial, ct));
                    break;
                }
                Ok(_) => {}
                Err(e) => failure = e,
            }
            scale *= 0.5;
        }
        let (next, c_next) = accepted.ok_or_else(|| evaluation_failed(iteration, failure))?;
        u = next;
        c = c_next;
        norm = inf_norm(&c);
        trace.push(norm);
    }

    if norm <= settings.tol {
        Ok(NewtonReport {
            root: u,
            residual: c,
            iterations: settings.max_iter,
            residual_norm: norm,
            trace,
            roundoff_limited: false,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: settings.max_iter,
            residual_norm: norm,
            trace,
        })
    }
}
