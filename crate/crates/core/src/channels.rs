//! Discrete-time quantum channels in Kraus form.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::state::DensityMatrix;
use crate::tolerances;

/// `max|sum_k E_k^dagger E_k - I|` for an arbitrary operator list.
pub fn completeness_residual(operators: &[ComplexMatrix]) -> f64 {
    let Some(first) = operators.first() else {
        return f64::INFINITY;
    };
    let dim = first.dim();
    if operators.iter().any(|e| e.dim() != dim) {
        return f64::INFINITY;
    }
    let mut sum = ComplexMatrix::zeros(dim);
    for e in operators {
        sum += &(&e.adjoint() * e);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim))
}

/// Trace-preserving completely positive map `rho -> sum_k E_k rho E_k^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Rejects operator lists with mismatched dimensions or a completeness
    /// residual above 1e-10. Nothing is renormalised.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators
            .first()
            .ok_or(Error::IncompleteChannel {
                residual: f64::INFINITY,
            })?
            .dim();
        for e in &operators {
            e.ensure_dim(dim)?;
        }
        let residual = completeness_residual(&operators);
        if residual > tolerances::KRAUS {
            return Err(Error::IncompleteChannel { residual });
        }
        Ok(Self { operators })
    }

    /// Qubit amplitude damping with decay probability `gamma`:
    /// `E_0 = diag(1, sqrt(1 - gamma))`, `E_1 = sqrt(gamma) |0><1|`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "damping probability must lie in [0, 1]",
            });
        }
        let z = C64::new(0.0, 0.0);
        let e0 = ComplexMatrix::from_row_slice(
            2,
            &[C64::new(1.0, 0.0), z, z, C64::new((1.0 - gamma).sqrt(), 0.0)],
        )?;
        let e1 = ComplexMatrix::from_row_slice(2, &[z, C64::new(gamma.sqrt(), 0.0), z, z])?;
        Self::new(vec![e0, e1])
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.operators)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.matrix().ensure_dim(self.dim())?;
        let mut out = ComplexMatrix::zeros(self.dim());
        for e in &self.operators {
            out += &(&(e * rho.matrix()) * &e.adjoint());
        }
        DensityMatrix::new(out.hermitian_part())
    }
}

/// Damping probability reached after time `t` at decay rate `rate`.
pub fn damping_probability(rate: f64, t: f64) -> f64 {
    -(-rate * t).exp_m1()
}
