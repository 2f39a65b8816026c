//! Random operators and states for property checks and sweeps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};
use crate::state::DensityMatrix;

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. complex Gaussian entries of standard deviation `scale`
/// in each of the real and imaginary parts.
pub fn random_complex(rng: &mut impl Rng, dim: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_raw(DMatrix::from_fn(dim, dim, |_, _| gaussian(rng) * scale))
}

/// GUE-like Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> ComplexMatrix {
    random_complex(rng, dim, scale).hermitian_part()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = random_complex(rng, dim, 1.0).into_inner();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    ComplexMatrix::from_raw(q * phases)
}

/// Full-rank mixed state `G G^dagger / tr(G G^dagger)` mixed with a little of
/// the identity so the smallest eigenvalue stays at least `floor / dim`.
pub fn random_density_matrix(rng: &mut impl Rng, dim: usize, floor: f64) -> DensityMatrix {
    let g = random_complex(rng, dim, 1.0);
    let w = &g * &g.adjoint();
    let w = w.scale(1.0 / w.trace().re);
    let mixed = &w.scale(1.0 - floor) + &ComplexMatrix::identity(dim).scale(floor / dim as f64);
    DensityMatrix::new(mixed).expect("convex mixture of states is a state")
}

pub fn random_pure_state(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let psi = DVector::from_fn(dim, |_, _| gaussian(rng));
    DensityMatrix::pure(&psi).expect("gaussian vector is nonzero")
}
