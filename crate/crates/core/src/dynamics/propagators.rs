//! Short-time propagators for `i dU/dt = H(t) U`: truncated Taylor and Dyson
//! expansions, and the exact exponential for constant generators.

use crate::error::{Error, Result};
use crate::linalg::{matrix_exponential_antihermitian, ComplexMatrix, C64, I};
use crate::observables::TimeDependentObservable;

/// Default Gauss-Legendre points per axis for the Dyson integrals.
pub const DEFAULT_QUAD_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationOrder {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Exact,
    Taylor1,
    Taylor2,
    Dyson1,
    Dyson2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorStep {
    pub matrix: ComplexMatrix,
    pub scheme: Scheme,
    /// `(t0, t0 + dt)`
    pub interval: (f64, f64),
}

fn check_step(dt: f64) -> Result<()> {
    if dt >= 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "step must be finite and non-negative",
        })
    }
}

/// `I - i H(t0) dt`, plus `(-i H'(t0) + (-i H(t0))^2) dt^2 / 2` at second order.
pub fn taylor_propagator(
    h: &TimeDependentObservable,
    t0: f64,
    dt: f64,
    order: TruncationOrder,
) -> Result<PropagatorStep> {
    check_step(dt)?;
    let h0 = h.evaluate(t0);
    let mut u = &ComplexMatrix::identity(h.dim()) + &(&h0 * (-I * dt));
    let scheme = match order {
        TruncationOrder::First => Scheme::Taylor1,
        TruncationOrder::Second => {
            let hdot = h.partial_time(t0);
            let second = &(&hdot * -I) - &(&h0 * &h0);
            u += &second.scale(0.5 * dt * dt);
            Scheme::Taylor2
        }
    };
    Ok(PropagatorStep {
        matrix: u,
        scheme,
        interval: (t0, t0 + dt),
    })
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// The first two Dyson integrals over `[t0, t0 + dt]`:
/// `int H(t1) dt1` and `int_{t2 <= t1} H(t1) H(t2) dt2 dt1`.
///
/// The triangle is mapped onto the unit square via `t2 = t0 + (t1 - t0) u`.
pub fn dyson_integrals(
    h: &TimeDependentObservable,
    t0: f64,
    dt: f64,
    quad_points: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_step(dt)?;
    if quad_points < 2 {
        return Err(Error::InvalidParameter {
            name: "quad_points",
            value: quad_points as f64,
            reason: "need at least two quadrature points",
        });
    }
    let (nodes, weights) = gauss_legendre(quad_points);
    let dim = h.dim();
    let mut first = ComplexMatrix::zeros(dim);
    let mut second = ComplexMatrix::zeros(dim);
    for (x, w) in nodes.iter().zip(&weights) {
        let tau = dt * x;
        let h1 = h.evaluate(t0 + tau);
        first += &h1.scale(w * dt);
        let mut inner = ComplexMatrix::zeros(dim);
        for (u, v) in nodes.iter().zip(&weights) {
            inner += &h.evaluate(t0 + tau * u).scale(v * tau);
        }
        second += &(&h1 * &inner).scale(w * dt);
    }
    Ok((first, second))
}

/// `I + (1/i) int H + (1/i)^2 int int_{t2<=t1} H H`, truncated at `order`.
pub fn dyson_propagator(
    h: &TimeDependentObservable,
    t0: f64,
    dt: f64,
    order: TruncationOrder,
    quad_points: usize,
) -> Result<PropagatorStep> {
    let (first, second) = dyson_integrals(h, t0, dt, quad_points)?;
    let mut u = &ComplexMatrix::identity(h.dim()) + &(first * -I);
    let scheme = match order {
        TruncationOrder::First => Scheme::Dyson1,
        TruncationOrder::Second => {
            u += &(second * C64::new(-1.0, 0.0));
            Scheme::Dyson2
        }
    };
    Ok(PropagatorStep {
        matrix: u,
        scheme,
        interval: (t0, t0 + dt),
    })
}

/// `exp(-i H dt)` for a time-independent `H`.
pub fn exact_propagator(h: &TimeDependentObservable, t0: f64, dt: f64) -> Result<PropagatorStep> {
    check_step(dt)?;
    if !h.is_time_independent() {
        return Err(Error::TimeDependentGenerator);
    }
    Ok(PropagatorStep {
        matrix: matrix_exponential_antihermitian(&h.evaluate(t0), dt)?,
        scheme: Scheme::Exact,
        interval: (t0, t0 + dt),
    })
}
