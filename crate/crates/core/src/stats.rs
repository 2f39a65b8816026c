//! Observable statistics along trajectories and the fluctuation-growth
//! inequalities evaluated on them.
//!
//! Everything here is keyed by grid index; use [`Trajectory::index_of`] to
//! go from a time.

use serde::Serialize;

use crate::dynamics::{LindbladModel, RhoDotSource, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, ComplexMatrix};
use crate::observables::TimeDependentObservable;
use crate::state::DensityMatrix;
use crate::tolerances;

fn checked(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<()> {
    m.ensure_dim(rho.dim())?;
    m.ensure_hermitian()
}

fn ensure_observable_dim(traj: &Trajectory, a: &TimeDependentObservable) -> Result<()> {
    if a.dim() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// `tr(rho m)` for Hermitian `m`; the round-off imaginary part is dropped.
pub fn expectation(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<f64> {
    checked(rho, m)?;
    Ok(trace_of_product(rho.matrix(), m)?.re)
}

/// `tr(rho m^2) - tr(rho m)^2`, clamped at zero.
pub fn variance(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<f64> {
    let mean = expectation(rho, m)?;
    let second = trace_of_product(rho.matrix(), &(m * m))?.re;
    Ok((second - mean * mean).max(0.0))
}

/// Symmetrised covariance `<{a, b}>/2 - <a><b>`.
pub fn covariance_sym(rho: &DensityMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    checked(rho, a)?;
    checked(rho, b)?;
    let ab = trace_of_product(rho.matrix(), &(a * b))?;
    let ba = trace_of_product(rho.matrix(), &(b * a))?;
    Ok(0.5 * (ab + ba).re - expectation(rho, a)? * expectation(rho, b)?)
}

/// `Re<ab> - <a><b>`; equals [`covariance_sym`] for Hermitian inputs.
pub fn covariance_nonsym_real(
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<f64> {
    checked(rho, a)?;
    checked(rho, b)?;
    let ab = trace_of_product(rho.matrix(), &(a * b))?;
    Ok(ab.re - expectation(rho, a)? * expectation(rho, b)?)
}

/// `tr(rho_dot (a - <a>)^2)` for a traceless `rho_dot`.
pub fn rho_dot_delta_sq(
    rho_dot: &ComplexMatrix,
    rho: &DensityMatrix,
    a: &ComplexMatrix,
) -> Result<f64> {
    rho_dot.ensure_dim(rho.dim())?;
    let trace = rho_dot.trace().norm();
    if trace > tolerances::TRACELESS * rho_dot.max_abs().max(1.0) {
        return Err(Error::NotTraceless { trace });
    }
    let mean = expectation(rho, a)?;
    let delta = a - &ComplexMatrix::identity(rho.dim()).scale(mean);
    Ok(trace_of_product(rho_dot, &(&delta * &delta))?.re)
}

/// Statistics of `A(t)` at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatPoint {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub sigma: f64,
    /// `Cov(A, dA/dt)`
    pub cov: f64,
    /// `tr(rho_dot (Delta A)^2)`
    pub rho_dot_term: f64,
    /// `rho_dot_term + 2 cov`
    pub var_rate: f64,
    /// Central difference of the variance, when both neighbours exist.
    pub var_rate_fd: Option<f64>,
    /// `<(dA/dt)^2>`
    pub partial_sq: f64,
}

/// Variance and its rate at grid point `k`.
pub fn variance_rate(
    traj: &Trajectory,
    a: &TimeDependentObservable,
    k: usize,
    source: RhoDotSource,
) -> Result<StatPoint> {
    ensure_observable_dim(traj, a)?;
    let t = traj.time(k);
    let rho = traj.state(k);
    let at = a.evaluate(t);
    let dat = a.partial_time(t);
    let rho_dot = traj.rho_dot(k, source)?;
    let mean = expectation(rho, &at)?;
    let var = variance(rho, &at)?;
    let cov = covariance_sym(rho, &at, &dat)?;
    let rho_dot_term = rho_dot_delta_sq(&rho_dot, rho, &at)?;
    let var_rate_fd = if traj.is_interior(k) {
        Some(traj.central_difference(k, |j| {
            variance(traj.state(j), &a.evaluate(traj.time(j)))
        })?)
    } else {
        None
    };
    Ok(StatPoint {
        t,
        mean,
        variance: var,
        sigma: var.sqrt(),
        cov,
        rho_dot_term,
        var_rate: rho_dot_term + 2.0 * cov,
        var_rate_fd,
        partial_sq: a.squared_partial_expectation(t, rho)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `sigma_dot^2 <= 2[<(dA/dt)^2> + tr(rho_dot (Delta A)^2)^2 / (4 sigma^2)]`
    Open,
    /// `sigma_dot^2 <= sigma_{A_dot}^2`
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SkipReason {
    SigmaBelowFloor { sigma: f64 },
}

/// One evaluation of an inequality `lhs <= rhs`. Skipped reports carry NaN
/// values and are never `satisfied`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub skipped: Option<SkipReason>,
}

impl BoundReport {
    fn evaluated(kind: BoundKind, t: f64, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            kind,
            t,
            lhs,
            rhs,
            margin,
            satisfied: margin >= -tolerances::BOUND,
            skipped: None,
        }
    }

    fn skipped(kind: BoundKind, t: f64, reason: SkipReason) -> Self {
        Self {
            kind,
            t,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            satisfied: false,
            skipped: Some(reason),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    /// True when evaluated and violated.
    pub fn is_violation(&self) -> bool {
        !self.is_skipped() && !self.satisfied
    }
}

/// `(d sigma/dt)^2 = var_rate^2 / (4 sigma^2)` against
/// `2[<(dA/dt)^2> + rho_dot_term^2 / (4 sigma^2)]`. Skipped when `sigma < eps_sigma`.
pub fn open_bound(
    traj: &Trajectory,
    a: &TimeDependentObservable,
    k: usize,
    eps_sigma: f64,
    source: RhoDotSource,
) -> Result<BoundReport> {
    let sp = variance_rate(traj, a, k, source)?;
    Ok(open_bound_from(&sp, eps_sigma))
}

pub(crate) fn open_bound_from(sp: &StatPoint, eps_sigma: f64) -> BoundReport {
    if sp.sigma < eps_sigma {
        return BoundReport::skipped(
            BoundKind::Open,
            sp.t,
            SkipReason::SigmaBelowFloor { sigma: sp.sigma },
        );
    }
    let four_var = 4.0 * sp.variance;
    let lhs = sp.var_rate * sp.var_rate / four_var;
    let rhs = 2.0 * (sp.partial_sq + sp.rho_dot_term * sp.rho_dot_term / four_var);
    BoundReport::evaluated(BoundKind::Open, sp.t, lhs, rhs)
}

/// Heisenberg-picture rate `dA/dt + i[H, A] + sum_k (L^dagger A L - {L^dagger L, A}/2)`.
pub fn adjoint_heisenberg_rate(
    model: &LindbladModel,
    a: &TimeDependentObservable,
    t: f64,
) -> Result<ComplexMatrix> {
    if a.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: a.dim(),
        });
    }
    let gen = model.adjoint_generator(&a.evaluate(t), t)?;
    Ok((&a.partial_time(t) + &gen).hermitian_part())
}

/// `(d sigma/dt)^2` against `sigma^2` of the Heisenberg rate. May be violated
/// for open systems; violations are reported, not raised.
pub fn closed_bound(
    traj: &Trajectory,
    model: &LindbladModel,
    a: &TimeDependentObservable,
    k: usize,
    eps_sigma: f64,
    source: RhoDotSource,
) -> Result<BoundReport> {
    let sp = variance_rate(traj, a, k, source)?;
    closed_bound_from(traj, model, a, k, &sp, eps_sigma)
}

pub(crate) fn closed_bound_from(
    traj: &Trajectory,
    model: &LindbladModel,
    a: &TimeDependentObservable,
    k: usize,
    sp: &StatPoint,
    eps_sigma: f64,
) -> Result<BoundReport> {
    if sp.sigma < eps_sigma {
        return Ok(BoundReport::skipped(
            BoundKind::Closed,
            sp.t,
            SkipReason::SigmaBelowFloor { sigma: sp.sigma },
        ));
    }
    let adot = adjoint_heisenberg_rate(model, a, sp.t)?;
    let lhs = sp.var_rate * sp.var_rate / (4.0 * sp.variance);
    let rhs = variance(traj.state(k), &adot)?;
    Ok(BoundReport::evaluated(BoundKind::Closed, sp.t, lhs, rhs))
}

/// `|rho_dot_term + 2 cov - central difference of sigma^2|` at an interior point.
pub fn eq36_residual(
    traj: &Trajectory,
    a: &TimeDependentObservable,
    k: usize,
    source: RhoDotSource,
) -> Result<f64> {
    traj.ensure_interior(k)?;
    let sp = variance_rate(traj, a, k, source)?;
    Ok(eq36_residual_from(&sp))
}

pub(crate) fn eq36_residual_from(sp: &StatPoint) -> f64 {
    sp.var_rate_fd.map_or(f64::NAN, |fd| (sp.var_rate - fd).abs())
}

/// `<{Delta A, A_dot}>` for a model without jump operators.
pub fn closed_system_anticommutator_rate(
    traj: &Trajectory,
    model: &LindbladModel,
    a: &TimeDependentObservable,
    k: usize,
) -> Result<f64> {
    if !model.is_closed() {
        return Err(Error::JumpOperatorsPresent);
    }
    let t = traj.time(k);
    let adot = adjoint_heisenberg_rate(model, a, t)?;
    Ok(2.0 * covariance_sym(traj.state(k), &a.evaluate(t), &adot)?)
}

/// `sigma_A^2 <(dA/dt)^2> - Cov(A, dA/dt)^2`, non-negative by Cauchy-Schwarz.
pub fn cauchy_schwarz_margin(sp: &StatPoint) -> f64 {
    sp.variance * sp.partial_sq - sp.cov * sp.cov
}
