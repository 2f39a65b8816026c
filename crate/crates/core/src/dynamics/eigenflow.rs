//! Pseudo-Hamiltonian extraction from the motion of a density matrix's
//! eigenvectors between two nearby times.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix, SpectralDecomposition, C64, I};
use crate::observables::TimeDependentObservable;
use crate::state::DensityMatrix;
use crate::tolerances;

use super::trajectory::Trajectory;

/// Eigenvectors of `rho_a` paired with those of `rho_b`, phase-aligned so each
/// overlap `<a_j|b_j>` is real and positive.
#[derive(Clone, Debug)]
pub struct EigenvectorFlow {
    dt: f64,
    before: SpectralDecomposition,
    /// Spectrum of `rho_b`, reordered to follow `before`.
    after: SpectralDecomposition,
    /// `permutation[j]` is the index of `after[j]` in the descending
    /// eigen-ordering of `rho_b`.
    permutation: Vec<usize>,
    transport: ComplexMatrix,
}

fn ensure_gap(spec: &SpectralDecomposition) -> Result<()> {
    let gap = spec.min_gap();
    if gap < tolerances::EIGEN_GAP {
        return Err(Error::DegenerateSpectrum { gap });
    }
    Ok(())
}

fn overlap(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.dotc(b)
}

impl EigenvectorFlow {
    pub fn between(rho_a: &DensityMatrix, rho_b: &DensityMatrix, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "step must be positive and finite",
            });
        }
        rho_b.matrix().ensure_dim(rho_a.dim())?;
        let before = hermitian_eigendecomposition(rho_a.matrix())?;
        let raw_after = hermitian_eigendecomposition(rho_b.matrix())?;
        ensure_gap(&before)?;
        ensure_gap(&raw_after)?;

        let n = before.dim();
        let mut permutation = Vec::with_capacity(n);
        for a in &before.eigenvectors {
            let mut scored: Vec<(usize, f64)> = raw_after
                .eigenvectors
                .iter()
                .enumerate()
                .map(|(k, b)| (k, overlap(a, b).norm()))
                .collect();
            scored.sort_by(|x, y| y.1.total_cmp(&x.1));
            let best = scored[0].1;
            let runner_up = scored.get(1).map_or(0.0, |s| s.1);
            if runner_up >= (1.0 - tolerances::PAIRING_AMBIGUITY) * best {
                return Err(Error::AmbiguousPairing { best, runner_up });
            }
            permutation.push(scored[0].0);
        }
        let mut seen = vec![false; n];
        for &k in &permutation {
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::AmbiguousPairing {
                    best: 1.0,
                    runner_up: 1.0,
                });
            }
        }

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = Vec::with_capacity(n);
        let mut transport = ComplexMatrix::zeros(n);
        for (a, &k) in before.eigenvectors.iter().zip(&permutation) {
            let b = &raw_after.eigenvectors[k];
            let ov = overlap(a, b);
            let phase = if ov.norm() > 0.0 {
                ov.conj() / ov.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            let b = b * phase;
            transport += &ComplexMatrix::outer(&b, a);
            eigenvalues.push(raw_after.eigenvalues[k]);
            eigenvectors.push(b);
        }
        Ok(Self {
            dt,
            before,
            after: SpectralDecomposition {
                eigenvalues,
                eigenvectors,
            },
            permutation,
            transport,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn before(&self) -> &SpectralDecomposition {
        &self.before
    }

    pub fn after(&self) -> &SpectralDecomposition {
        &self.after
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// `T = sum_j |b_j><a_j|`.
    pub fn transport(&self) -> &ComplexMatrix {
        &self.transport
    }

    /// Hermitian part of `i(T - I)/dt`, i.e. `i(T - T^dagger)/(2 dt)`.
    pub fn omega(&self) -> ComplexMatrix {
        let anti = &self.transport - &self.transport.adjoint();
        (anti * I).scale(0.5 / self.dt).hermitian_part()
    }

    /// `||(I - i Omega dt) a_j - b_j||` for each pair.
    pub fn residuals(&self) -> Vec<f64> {
        let n = self.before.dim();
        let step = &ComplexMatrix::identity(n) + &(self.omega() * (-I * self.dt));
        self.before
            .eigenvectors
            .iter()
            .zip(&self.after.eigenvectors)
            .map(|(a, b)| (step.as_matrix() * a - b).norm())
            .collect()
    }

    /// `(p_j(b) - p_j(a)) / dt` in the pairing order.
    pub fn population_rates(&self) -> Vec<f64> {
        self.before
            .eigenvalues
            .iter()
            .zip(&self.after.eigenvalues)
            .map(|(pa, pb)| (pb - pa) / self.dt)
            .collect()
    }
}

/// Pseudo-Hamiltonian `Omega` generating the eigenvector flow from `rho_a`
/// to `rho_b` over `dt`.
pub fn extract_pseudo_hamiltonian(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    dt: f64,
) -> Result<ComplexMatrix> {
    Ok(EigenvectorFlow::between(rho_a, rho_b, dt)?.omega())
}

/// `d<A>/dt` split into population, explicit and coherent parts, next to a
/// central finite difference of `<A>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanRateDecomposition {
    pub t: f64,
    /// `sum_j pdot_j <psi_j|A|psi_j>`
    pub population: f64,
    /// `<dA/dt>`
    pub explicit: f64,
    /// `i <[Omega, A]>`
    pub coherent: f64,
    /// central difference of `<A>`
    pub finite_difference: f64,
}

impl MeanRateDecomposition {
    pub fn total(&self) -> f64 {
        self.population + self.explicit + self.coherent
    }

    pub fn residual(&self) -> f64 {
        (self.total() - self.finite_difference).abs()
    }
}

/// Reconstructs `d<A>/dt` at interior grid point `k` from eigenvalue rates and
/// the pseudo-Hamiltonian, both taken symmetrically around `t_k`.
pub fn mean_rate_decomposition(
    traj: &Trajectory,
    a: &TimeDependentObservable,
    k: usize,
) -> Result<MeanRateDecomposition> {
    traj.ensure_interior(k)?;
    if a.dim() != traj.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.dim(),
            found: a.dim(),
        });
    }
    let dt = traj.dt();
    let t = traj.time(k);
    let minus = EigenvectorFlow::between(traj.state(k - 1), traj.state(k), dt)?;
    let plus = EigenvectorFlow::between(traj.state(k), traj.state(k + 1), dt)?;
    let here = plus.before();
    let at = a.evaluate(t);

    let mut population = 0.0;
    for (i, psi) in here.eigenvectors.iter().enumerate() {
        let j = minus
            .permutation()
            .iter()
            .position(|&p| p == i)
            .ok_or(Error::AmbiguousPairing {
                best: 1.0,
                runner_up: 1.0,
            })?;
        let p_prev = minus.before().eigenvalues[j];
        let p_next = plus.after().eigenvalues[i];
        let pdot = (p_next - p_prev) / (2.0 * dt);
        population += pdot * psi.dotc(&(at.as_matrix() * psi)).re;
    }

    let omega = (&minus.omega() + &plus.omega()).scale(0.5);
    let rho = traj.state(k).matrix();
    let comm = &(&omega * &at) - &(&at * &omega);
    let coherent = (crate::linalg::trace_of_product(rho, &comm)? * I).re;
    let explicit = crate::linalg::trace_of_product(rho, &a.partial_time(t))?.re;
    let mean = |j: usize| -> Result<f64> {
        Ok(crate::linalg::trace_of_product(traj.state(j).matrix(), &a.evaluate(traj.time(j)))?.re)
    };
    let finite_difference = traj.central_difference(k, mean)?;
    Ok(MeanRateDecomposition {
        t,
        population,
        explicit,
        coherent,
        finite_difference,
    })
}
