//! Dense complex matrix algebra for small Hilbert spaces.
//!
//! Matrices are stored as `nalgebra::DMatrix<Complex64>` behind the
//! [`ComplexMatrix`] newtype, which guarantees squareness and finite entries
//! on construction.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds a matrix from row-major real and imaginary grids.
    pub fn from_real_imag(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: im.len(),
            });
        }
        for row in re.iter().chain(im) {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| C64::new(re[i][j], im[i][j])))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                cols: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    /// `|ket><bra|` for normalised or unnormalised vectors.
    pub fn outer(ket: &DVector<C64>, bra: &DVector<C64>) -> Self {
        Self(ket * bra.adjoint())
    }

    /// Computational-basis projector-like element `|i><j|`.
    pub fn basis_element(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = ONE;
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max|m_ij - conj(m_ji)|`, divided by `max|m_ij|` when that is nonzero.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        let scale = self.max_abs();
        if scale > 0.0 {
            dev / scale
        } else {
            dev
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= tolerances::HERMITIAN
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation <= tolerances::HERMITIAN {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    /// Row-major real and imaginary grids.
    pub fn to_real_imag(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.dim();
        let re = (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| self.0[(i, j)].im).collect()).collect();
        (re, im)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;

    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        ComplexMatrix(self.0 * C64::new(rhs, 0.0))
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    b.ensure_dim(a.dim())
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&(a * b) + &(b * a))
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// `tr(ab)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(acc)
}

/// Eigenvalues in descending order with orthonormal, phase-fixed eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<C64>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `sum_j p_j |psi_j><psi_j|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|p| C64::new(p, 0.0))
    }

    /// `sum_j f(p_j) |psi_j><psi_j|`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (p, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m += v * v.adjoint() * f(*p);
        }
        ComplexMatrix(m)
    }

    /// `max|<psi_i|psi_j> - delta_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((a.dotc(b) - target).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Smallest gap between adjacent eigenvalues; infinite in dimension one.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| (w[0] - w[1]).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Rotates `v` so that its largest-magnitude component is real and positive.
///
/// Among components whose magnitudes agree to within 1e-12 the first one wins.
pub fn fix_phase(v: &mut DVector<C64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("maximum exists");
    let phase = v[pivot].conj() / v[pivot].norm();
    *v *= phase;
    v[pivot] = C64::new(v[pivot].norm(), 0.0);
}

fn lexicographic_desc(a: &DVector<C64>, b: &DVector<C64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = y
            .re
            .partial_cmp(&x.re)
            .unwrap_or(Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(Ordering::Equal));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrised before decomposition. Eigenvalues come out in
/// descending order; within a cluster of eigenvalues equal to 1e-12 relative,
/// eigenvectors are ordered lexicographically (descending) by their
/// phase-fixed components.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    m.ensure_hermitian()?;
    Ok(eigh_unchecked(&m.hermitian_part()))
}

pub(crate) fn eigh_unchecked(m: &ComplexMatrix) -> SpectralDecomposition {
    let n = m.dim();
    let eig = m.0.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<C64>)> = (0..n)
        .map(|j| {
            let mut v: DVector<C64> = eig.eigenvectors.column(j).into_owned();
            let norm = v.norm();
            if norm > 0.0 {
                v /= C64::new(norm, 0.0);
            }
            fix_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= 1e-12 * scale {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic_desc(&a.1, &b.1));
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `exp(-i s g)` for Hermitian `g`, computed spectrally.
pub fn matrix_exponential_antihermitian(g: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eigendecomposition(g)?;
    Ok(spectrum.map_eigenvalues(|lambda| (-I * s * lambda).exp()))
}

/// `max|U^dagger U - I|`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.dim()))
}

/// Pauli matrices and ladder operators in the computational basis
/// `{|0>, |1>}` with `sigma_z |0> = |0>`.
pub mod pauli {
    use super::*;

    fn m2(entries: [C64; 4]) -> ComplexMatrix {
        ComplexMatrix(DMatrix::from_row_slice(2, 2, &entries))
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        m2([ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> ComplexMatrix {
        m2([ZERO, -I, I, ZERO])
    }

    pub fn z() -> ComplexMatrix {
        m2([ONE, ZERO, ZERO, -ONE])
    }

    /// Lowering operator `|0><1|`.
    pub fn minus() -> ComplexMatrix {
        m2([ZERO, ONE, ZERO, ZERO])
    }

    /// Raising operator `|1><0|`.
    pub fn plus() -> ComplexMatrix {
        m2([ZERO, ZERO, ONE, ZERO])
    }

    /// `|k><k|` for `k` in `{0, 1}`.
    pub fn projector(k: usize) -> ComplexMatrix {
        ComplexMatrix::basis_element(2, k, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn pauli_commutator() {
        let c = commutator(&pauli::x(), &pauli::y()).unwrap();
        assert!(close(&c, &(pauli::z() * (I * 2.0)), 1e-15));
    }

    #[test]
    fn self_commutator_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = sampling::random_hermitian(&mut rng, 4, 1.0);
        assert_eq!(commutator(&m, &m).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sigma_z_with_rotating_observable_at_zero() {
        // A(0) = sigma_x; brute-force 2x2 products.
        let z = [[1.0, 0.0], [0.0, -1.0]];
        let x = [[0.0, 1.0], [1.0, 0.0]];
        let mut expected = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += z[i][k] * x[k][j] - x[i][k] * z[k][j];
                }
                expected[i][j] = C64::new(s, 0.0);
            }
        }
        let flat: Vec<C64> = expected.iter().flatten().copied().collect();
        let expected = ComplexMatrix::from_row_slice(2, &flat).unwrap();
        let c = commutator(&pauli::z(), &pauli::x()).unwrap();
        assert!(close(&c, &expected, 1e-15));
        assert!(close(&c, &(pauli::y() * (I * 2.0)), 1e-15));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = commutator(&pauli::x(), &ComplexMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
        assert!(anticommutator(&pauli::x(), &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn anticommutator_examples() {
        let a = anticommutator(&pauli::x(), &pauli::x()).unwrap();
        assert!(close(&a, &(pauli::identity() * 2.0), 1e-15));
        let n = &pauli::plus() * &pauli::minus();
        let p1 = pauli::projector(1);
        assert!(close(&n, &p1, 0.0));
        let a = anticommutator(&n, &p1).unwrap();
        assert!(close(&a, &(p1 * 2.0), 1e-15));
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace(&ComplexMatrix::identity(2)), C64::new(2.0, 0.0));
        assert_eq!(trace(&pauli::z()), ZERO);
    }

    #[test]
    fn construction_rejects_bad_input() {
        let nan = DMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
        assert_eq!(ComplexMatrix::new(nan).unwrap_err(), Error::NonFinite);
        let rect = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(ComplexMatrix::new(rect), Err(Error::NotSquare { .. })));
        assert_eq!(
            ComplexMatrix::new(DMatrix::zeros(0, 0)).unwrap_err(),
            Error::EmptyMatrix
        );
    }

    #[test]
    fn eigendecomposition_of_sigma_z() {
        let s = hermitian_eigendecomposition(&pauli::z()).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, -1.0]);
        assert!((s.eigenvectors[0][0] - ONE).norm() < 1e-15);
        assert!((s.eigenvectors[1][1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn eigendecomposition_of_damped_state() {
        for g in [0.1f64, 0.3, 0.8] {
            let x = (-g).exp();
            let rho = ComplexMatrix::from_real_rows(&[&[1.0 - x, 0.0], &[0.0, x]]).unwrap();
            let s = hermitian_eigendecomposition(&rho).unwrap();
            assert!((s.eigenvalues[0] - x.max(1.0 - x)).abs() < 1e-15);
            assert!((s.eigenvalues[1] - x.min(1.0 - x)).abs() < 1e-15);
        }
    }

    #[test]
    fn eigendecomposition_rejects_non_hermitian() {
        assert!(matches!(
            hermitian_eigendecomposition(&pauli::minus()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn random_three_level_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = sampling::random_hermitian(&mut rng, 3, 1.0);
        let s = hermitian_eigendecomposition(&m).unwrap();
        assert!(s.reconstruct().max_abs_diff(&m) < tolerances::RECONSTRUCTION);
        assert!(s.orthonormality_residual() < tolerances::ORTHONORMAL);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn degenerate_spectrum_is_ordered_deterministically() {
        let s = hermitian_eigendecomposition(&ComplexMatrix::identity(3)).unwrap();
        for (k, v) in s.eigenvectors.iter().enumerate() {
            assert!((v[k] - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = sampling::random_hermitian(&mut rng, 4, 1.0);
        let s = hermitian_eigendecomposition(&m).unwrap();
        for v in &s.eigenvectors {
            let (idx, _) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap();
            assert!(v[idx].im.abs() < 1e-15 && v[idx].re > 0.0);
        }
    }

    #[test]
    fn exponential_of_diagonal_generator() {
        let theta = 0.37;
        let u = matrix_exponential_antihermitian(&pauli::z(), theta).unwrap();
        let expected = ComplexMatrix::from_row_slice(
            2,
            &[(-I * theta).exp(), ZERO, ZERO, (I * theta).exp()],
        )
        .unwrap();
        assert!(close(&u, &expected, 1e-15));
        let id = matrix_exponential_antihermitian(&pauli::x(), 0.0).unwrap();
        assert!(close(&id, &pauli::identity(), 1e-15));
    }

    #[test]
    fn exponential_matches_power_series() {
        // sum_{k<20} (-i pi/2 sigma_x)^k / k!
        let x = pauli::x();
        let step = &x * (-I * std::f64::consts::FRAC_PI_2);
        let mut term = ComplexMatrix::identity(2);
        let mut sum = ComplexMatrix::identity(2);
        for k in 1..20 {
            term = &(&term * &step) * C64::new(1.0 / k as f64, 0.0);
            sum += &term;
        }
        let u = matrix_exponential_antihermitian(&x, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(close(&u, &sum, 1e-12));
        assert!(close(&u, &(&x * -I), 1e-14));
    }

    #[test]
    fn exponential_rejects_non_hermitian() {
        assert!(matrix_exponential_antihermitian(&pauli::plus(), 1.0).is_err());
    }

    fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
        (2usize..=8, any::<u64>()).prop_map(|(dim, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sampling::random_hermitian(&mut rng, dim, 1.0)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigendecomposition_round_trip(m in hermitian_strategy()) {
            let s = hermitian_eigendecomposition(&m).unwrap();
            prop_assert!(s.reconstruct().max_abs_diff(&m) <= tolerances::RECONSTRUCTION);
            prop_assert!(s.orthonormality_residual() <= tolerances::ORTHONORMAL);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn bracket_hermiticity(dim in 2usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_hermitian(&mut rng, dim, 1.0);
            let b = sampling::random_hermitian(&mut rng, dim, 1.0);
            let c = commutator(&a, &b).unwrap();
            let d = anticommutator(&a, &b).unwrap();
            prop_assert!(c.adjoint().max_abs_diff(&-&c) <= tolerances::HERMITIAN);
            prop_assert!(d.adjoint().max_abs_diff(&d) <= tolerances::HERMITIAN);
        }

        #[test]
        fn cyclic_trace(dim in 1usize..=8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_complex(&mut rng, dim, 1.0);
            let b = sampling::random_complex(&mut rng, dim, 1.0);
            let c = sampling::random_complex(&mut rng, dim, 1.0);
            let abc = trace(&(&(&a * &b) * &c));
            let bca = trace(&(&(&b * &c) * &a));
            let cab = trace(&(&(&c * &a) * &b));
            let scale = abc.norm().max(1.0);
            prop_assert!((abc - bca).norm() <= 1e-12 * scale);
            prop_assert!((abc - cab).norm() <= 1e-12 * scale);
        }

        #[test]
        fn exponential_is_unitary(dim in 1usize..=8, seed in any::<u64>(), s in -10.0f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = sampling::random_hermitian(&mut rng, dim, 1.0);
            let u = matrix_exponential_antihermitian(&g, s).unwrap();
            prop_assert!(unitarity_residual(&u) <= tolerances::UNITARY);
        }
    }
}
