use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

use super::lindblad::LindbladModel;

/// Where a trajectory's states came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Model(LindbladModel),
    External,
}

/// How to obtain `drho/dt` at a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoDotSource {
    /// Evaluate the generating model's right-hand side.
    Analytic,
    /// Central difference of neighbouring states.
    FiniteDifference,
}

/// States sampled on a uniform time grid `t_k = t0 + k dt`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    generator: Generator,
}

impl Trajectory {
    fn build(t0: f64, dt: f64, states: Vec<DensityMatrix>, generator: Generator) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidGrid("step must be positive and finite"));
        }
        let Some(first) = states.first() else {
            return Err(Error::InvalidGrid("no states"));
        };
        let dim = first.dim();
        for s in &states {
            s.matrix().ensure_dim(dim)?;
        }
        let times = (0..states.len()).map(|k| t0 + k as f64 * dt).collect();
        Ok(Self {
            t0,
            dt,
            times,
            states,
            generator,
        })
    }

    pub(crate) fn with_model(
        t0: f64,
        dt: f64,
        states: Vec<DensityMatrix>,
        model: LindbladModel,
    ) -> Result<Self> {
        if let Some(s) = states.first() {
            s.matrix().ensure_dim(model.dim())?;
        }
        Self::build(t0, dt, states, Generator::Model(model))
    }

    /// Wraps externally supplied samples. `times` must be strictly increasing
    /// and uniformly spaced to within 1e-9 of the mean step.
    pub fn from_samples(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidGrid("times and states differ in length"));
        }
        if times.len() < 2 {
            return Err(Error::InvalidGrid("need at least two samples"));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        if dt.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidGrid("times must increase"));
        }
        for (k, t) in times.iter().enumerate() {
            if (t - (times[0] + k as f64 * dt)).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::InvalidGrid("spacing is not uniform"));
            }
        }
        Self::build(times[0], dt, states, Generator::External)
    }

    /// Same states with the model dropped, so only finite differences apply.
    pub fn without_model(&self) -> Self {
        Self {
            generator: Generator::External,
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, k: usize) -> f64 {
        self.times[k]
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &DensityMatrix {
        &self.states[k]
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn model(&self) -> Option<&LindbladModel> {
        match &self.generator {
            Generator::Model(m) => Some(m),
            Generator::External => None,
        }
    }

    /// Analytic when a model is attached, finite differences otherwise.
    pub fn preferred_source(&self) -> RhoDotSource {
        match self.generator {
            Generator::Model(_) => RhoDotSource::Analytic,
            Generator::External => RhoDotSource::FiniteDifference,
        }
    }

    /// Grid index of time `t`, allowing 1e-6 of a step of slack.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.t0) / self.dt;
        let k = x.round();
        if k < 0.0 || (x - k).abs() > 1e-6 || k as usize >= self.len() {
            return Err(Error::NotOnGrid { t });
        }
        Ok(k as usize)
    }

    pub fn is_interior(&self, k: usize) -> bool {
        k >= 1 && k + 1 < self.len()
    }

    pub fn ensure_interior(&self, k: usize) -> Result<()> {
        if self.is_interior(k) {
            Ok(())
        } else {
            Err(Error::GridBoundary {
                index: k,
                len: self.len(),
            })
        }
    }

    /// Central difference of a scalar sampled on the grid.
    pub fn central_difference(&self, k: usize, f: impl Fn(usize) -> Result<f64>) -> Result<f64> {
        self.ensure_interior(k)?;
        Ok((f(k + 1)? - f(k - 1)?) / (2.0 * self.dt))
    }

    pub fn rho_dot(&self, k: usize, source: RhoDotSource) -> Result<ComplexMatrix> {
        match source {
            RhoDotSource::Analytic => {
                let model = self.model().ok_or(Error::NoGenerator)?;
                Ok(model.rhs_raw(self.states[k].matrix(), self.times[k]))
            }
            RhoDotSource::FiniteDifference => {
                self.ensure_interior(k)?;
                let diff = self.states[k + 1].matrix() - self.states[k - 1].matrix();
                Ok(diff.scale(0.5 / self.dt))
            }
        }
    }
}
