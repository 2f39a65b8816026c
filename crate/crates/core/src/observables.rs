//! Time-dependent observables `A(t) = sum_k c_k(t) B_k` with exact partial
//! time derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::tolerances;

/// Scalar coefficient drawn from a closed family with known derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientFunction {
    Constant {
        value: f64,
    },
    /// `amplitude * cos(frequency * t + phase)`
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude * sin(frequency * t + phase)`
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude * exp(-rate * t)`
    ExponentialDecay { amplitude: f64, rate: f64 },
    /// `sum_k coefficients[k] * t^k`, degree at most 8.
    Polynomial { coefficients: Vec<f64> },
}

impl CoefficientFunction {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn cosine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self::Cosine {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn sine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self::Sine {
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn exponential_decay(amplitude: f64, rate: f64) -> Self {
        Self::ExponentialDecay { amplitude, rate }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let f = Self::Polynomial { coefficients };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let params: Vec<(&'static str, f64)> = match self {
            Self::Constant { value } => vec![("value", *value)],
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            }
            | Self::Sine {
                amplitude,
                frequency,
                phase,
            } => vec![
                ("amplitude", *amplitude),
                ("frequency", *frequency),
                ("phase", *phase),
            ],
            Self::ExponentialDecay { amplitude, rate } => {
                vec![("amplitude", *amplitude), ("rate", *rate)]
            }
            Self::Polynomial { coefficients } => {
                if coefficients.len() > tolerances::MAX_POLY_DEGREE + 1 {
                    return Err(Error::PolynomialDegree {
                        degree: coefficients.len() - 1,
                        max: tolerances::MAX_POLY_DEGREE,
                    });
                }
                coefficients.iter().map(|c| ("coefficient", *c)).collect()
            }
        };
        for (name, value) in params {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).cos(),
            Self::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            Self::ExponentialDecay { amplitude, rate } => amplitude * (-rate * t).exp(),
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Cosine {
                amplitude,
                frequency,
                phase,
            } => -amplitude * frequency * (frequency * t + phase).sin(),
            Self::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * frequency * (frequency * t + phase).cos(),
            Self::ExponentialDecay { amplitude, rate } => -rate * amplitude * (-rate * t).exp(),
            Self::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Cosine {
                amplitude,
                frequency,
                ..
            }
            | Self::Sine {
                amplitude,
                frequency,
                ..
            } => *amplitude == 0.0 || *frequency == 0.0,
            Self::ExponentialDecay { amplitude, rate } => *amplitude == 0.0 || *rate == 0.0,
            Self::Polynomial { coefficients } => coefficients.iter().skip(1).all(|c| *c == 0.0),
        }
    }
}

/// One `c(t) * B` contribution to an observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: CoefficientFunction,
    pub operator: ComplexMatrix,
}

/// Hermitian operator `A(t)` as a real linear combination of fixed Hermitian
/// basis operators.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeDependentObservable {
    terms: Vec<Term>,
    dim: usize,
}

impl TimeDependentObservable {
    pub fn new(terms: Vec<(CoefficientFunction, ComplexMatrix)>) -> Result<Self> {
        let dim = terms.first().ok_or(Error::EmptyObservable)?.1.dim();
        let mut out = Vec::with_capacity(terms.len());
        for (coefficient, operator) in terms {
            coefficient.validate()?;
            operator.ensure_dim(dim)?;
            operator.ensure_hermitian()?;
            out.push(Term {
                coefficient,
                operator: operator.hermitian_part(),
            });
        }
        Ok(Self { terms: out, dim })
    }

    pub fn constant(operator: ComplexMatrix) -> Result<Self> {
        Self::new(vec![(CoefficientFunction::constant(1.0), operator)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_time_independent(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient.is_constant())
    }

    fn combine(&self, f: impl Fn(&CoefficientFunction) -> f64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for term in &self.terms {
            acc += &term.operator.scale(f(&term.coefficient));
        }
        acc
    }

    /// `A(t)`.
    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        self.combine(|c| c.value(t))
    }

    /// `dA/dt` holding the state fixed.
    pub fn partial_time(&self, t: f64) -> ComplexMatrix {
        self.combine(|c| c.derivative(t))
    }

    /// `tr(rho (dA/dt)^2)`.
    pub fn squared_partial_expectation(&self, t: f64, rho: &DensityMatrix) -> Result<f64> {
        rho.matrix().ensure_dim(self.dim)?;
        let d = self.partial_time(t);
        let d2 = &d * &d;
        Ok(trace_of_product(rho.matrix(), &d2)?.re.max(0.0))
    }
}
