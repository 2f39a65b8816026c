//! Numerical tolerances shared across modules.
//!
//! All values are absolute unless stated otherwise and assume Hilbert-space
//! dimension at most 8 in double precision.

/// Hermiticity check, applied to `max|m_ij - conj(m_ji)|` divided by `max|m_ij|`.
pub const HERMITIAN: f64 = 1e-10;
/// `|tr(rho) - 1|` for a valid density matrix.
pub const TRACE: f64 = 1e-8;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD: f64 = 1e-10;
/// Looser positivity floor used while integrating, where truncation error is expected.
pub const PSD_RUN: f64 = 1e-8;
/// Eigenvector Gram matrix deviation from the identity.
pub const ORTHONORMAL: f64 = 1e-10;
/// Max-norm residual of a spectral reconstruction.
pub const RECONSTRUCTION: f64 = 1e-9;
/// `max|U^dagger U - I|` for exact propagators.
pub const UNITARY: f64 = 1e-10;
/// `max|sum E_k^dagger E_k - I|` for a Kraus channel.
pub const KRAUS: f64 = 1e-10;
/// Smallest eigenvalue gap accepted by pseudo-Hamiltonian extraction.
pub const EIGEN_GAP: f64 = 1e-6;
/// Relative margin under which two overlaps count as ambiguous.
pub const PAIRING_AMBIGUITY: f64 = 0.1;
/// Standard deviations below this are reported as skipped by the bound checks.
pub const SIGMA_FLOOR: f64 = 1e-6;
/// Margins above `-BOUND` count as satisfied.
pub const BOUND: f64 = 1e-9;
/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IMAG: f64 = 1e-10;
/// Largest trace tolerated for a state derivative.
pub const TRACELESS: f64 = 1e-10;
/// Largest polynomial degree accepted for coefficient functions.
pub const MAX_POLY_DEGREE: usize = 8;
