use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{eigh_unchecked, ComplexMatrix, SpectralDecomposition, C64};
use crate::tolerances;

/// Hermitian, unit-trace, positive-semidefinite matrix.
///
/// The stored matrix is exactly Hermitian: construction validates the input
/// and then keeps its Hermitian part.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_psd_tolerance(m, tolerances::PSD)
    }

    /// Validates with a custom positivity floor; trace and Hermiticity
    /// tolerances are fixed.
    pub fn with_psd_tolerance(m: ComplexMatrix, psd_tolerance: f64) -> Result<Self> {
        m.ensure_hermitian()?;
        let m = m.hermitian_part();
        let trace = m.trace().re;
        if (trace - 1.0).abs() > tolerances::TRACE {
            return Err(Error::TraceMismatch { trace });
        }
        let min_eigenvalue = eigh_unchecked(&m).min_eigenvalue();
        if min_eigenvalue < -psd_tolerance {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(m))
    }

    /// `|psi><psi|` for a normalised copy of `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "psi",
                value: norm,
                reason: "state vector must have a finite nonzero norm",
            });
        }
        let v = psi / C64::new(norm, 0.0);
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// Computational basis state `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        Self(ComplexMatrix::basis_element(dim, k, k))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn spectrum(&self) -> SpectralDecomposition {
        eigh_unchecked(&self.0)
    }

    pub fn trace_deviation(&self) -> f64 {
        (self.0.trace() - C64::new(1.0, 0.0)).norm()
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}
