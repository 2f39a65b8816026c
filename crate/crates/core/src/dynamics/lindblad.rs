use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64, I};
use crate::observables::TimeDependentObservable;
use crate::state::DensityMatrix;
use crate::tolerances;

use super::trajectory::Trajectory;

/// Hamiltonian plus jump operators of a Markovian master equation
/// `drho/dt = -i[H(t), rho] + sum_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: Option<TimeDependentObservable>,
    jump_operators: Vec<ComplexMatrix>,
    // L_k^dagger L_k, cached
    jump_products: Vec<ComplexMatrix>,
}

impl LindbladModel {
    /// `hamiltonian: None` means `H = 0`.
    pub fn new(
        dim: usize,
        hamiltonian: Option<TimeDependentObservable>,
        jump_operators: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some(h) = &hamiltonian {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
        }
        for l in &jump_operators {
            l.ensure_dim(dim)?;
        }
        let jump_products = jump_operators.iter().map(|l| &l.adjoint() * l).collect();
        Ok(Self {
            dim,
            hamiltonian,
            jump_operators,
            jump_products,
        })
    }

    /// Closed system with Hamiltonian `h`.
    pub fn closed(h: TimeDependentObservable) -> Self {
        let dim = h.dim();
        Self::new(dim, Some(h), Vec::new()).expect("dimensions agree")
    }

    /// Qubit with `H = (omega/2) sigma_z` (omitted when `omega == 0`) and
    /// `L = sqrt(rate) sigma_-`.
    pub fn amplitude_damping(rate: f64, omega: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                reason: "decay rate must be finite and non-negative",
            });
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                reason: "must be finite",
            });
        }
        let h = if omega == 0.0 {
            None
        } else {
            Some(TimeDependentObservable::constant(pauli::z().scale(omega / 2.0))?)
        };
        Self::new(2, h, vec![pauli::minus().scale(rate.sqrt())])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> Option<&TimeDependentObservable> {
        self.hamiltonian.as_ref()
    }

    pub fn jump_operators(&self) -> &[ComplexMatrix] {
        &self.jump_operators
    }

    pub fn is_closed(&self) -> bool {
        self.jump_operators.is_empty()
    }

    pub fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        match &self.hamiltonian {
            Some(h) => h.evaluate(t),
            None => ComplexMatrix::zeros(self.dim),
        }
    }

    /// Right-hand side evaluated on an arbitrary matrix (used for Runge-Kutta
    /// stages, which need not be valid states).
    pub(crate) fn rhs_raw(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let mut out = match &self.hamiltonian {
            Some(h) => {
                let h = h.evaluate(t);
                (&(&h * rho) - &(rho * &h)) * -I
            }
            None => ComplexMatrix::zeros(self.dim),
        };
        for (l, ldl) in self.jump_operators.iter().zip(&self.jump_products) {
            out += &(&(l * rho) * &l.adjoint());
            let anti = &(ldl * rho) + &(rho * ldl);
            out += &anti.scale(-0.5);
        }
        out
    }

    /// Adjoint generator applied to an operator:
    /// `i[H(t), A] + sum_k (L_k^dagger A L_k - {L_k^dagger L_k, A}/2)`.
    pub fn adjoint_generator(&self, a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        a.ensure_dim(self.dim)?;
        let mut out = match &self.hamiltonian {
            Some(h) => {
                let h = h.evaluate(t);
                (&(&h * a) - &(a * &h)) * I
            }
            None => ComplexMatrix::zeros(self.dim),
        };
        for (l, ldl) in self.jump_operators.iter().zip(&self.jump_products) {
            out += &(&(&l.adjoint() * a) * l);
            let anti = &(ldl * a) + &(a * ldl);
            out += &anti.scale(-0.5);
        }
        Ok(out)
    }
}

/// `drho/dt` for the model at time `t`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix, t: f64) -> Result<ComplexMatrix> {
    rho.matrix().ensure_dim(model.dim)?;
    Ok(model.rhs_raw(rho.matrix(), t))
}

/// Fixed-step classical fourth-order Runge-Kutta integration on the grid
/// `t_k = k dt`, `k = 0..=floor(t_max/dt)`.
///
/// Each accepted state is re-symmetrised but never renormalised. The run
/// aborts if an eigenvalue drops below `-1e-8` or the trace leaves `1 +- 1e-8`.
pub fn integrate(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    rho0.matrix().ensure_dim(model.dim)?;
    let steps = grid_steps(t_max, dt)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    let half = 0.5 * dt;
    for k in 0..steps {
        let t = k as f64 * dt;
        let k1 = model.rhs_raw(&rho, t);
        let k2 = model.rhs_raw(&(&rho + &k1.scale(half)), t + half);
        let k3 = model.rhs_raw(&(&rho + &k2.scale(half)), t + half);
        let k4 = model.rhs_raw(&(&rho + &k3.scale(dt)), t + dt);
        let mut incr = k1;
        incr += &k2.scale(2.0);
        incr += &k3.scale(2.0);
        incr += &k4;
        rho = (&rho + &incr.scale(dt / 6.0)).hermitian_part();
        let t_next = (k + 1) as f64 * dt;
        let state = DensityMatrix::with_psd_tolerance(rho.clone(), tolerances::PSD_RUN).map_err(
            |e| match e {
                Error::NotPositive { min_eigenvalue } => Error::PositivityViolation {
                    t: t_next,
                    min_eigenvalue,
                },
                other => Error::StateAt {
                    t: t_next,
                    source: Box::new(other),
                },
            },
        )?;
        states.push(state);
    }
    Trajectory::with_model(0.0, dt, states, model.clone())
}

pub(crate) fn grid_steps(t_max: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "step must be positive and finite",
        });
    }
    if !(t_max >= dt && t_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "final time must be finite and at least one step",
        });
    }
    Ok((t_max / dt + 1e-9).floor() as usize)
}

/// Closed-form amplitude-damping solution with `H = (omega/2) sigma_z`:
/// populations relax at `rate`, coherences decay at `rate/2` and rotate at `omega`.
pub fn analytic_amplitude_damping(
    rho0: &DensityMatrix,
    rate: f64,
    omega: f64,
    t: f64,
) -> Result<DensityMatrix> {
    rho0.matrix().ensure_dim(2)?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "decay rate must be finite and non-negative",
        });
    }
    let r = rho0.matrix();
    let decay = (-rate * t).exp();
    let gained = -(-rate * t).exp_m1();
    let coherence = C64::from_polar((-0.5 * rate * t).exp(), -omega * t);
    let p0 = r[(0, 0)] + r[(1, 1)] * gained;
    let p1 = r[(1, 1)] * decay;
    let c01 = coherence * r[(0, 1)];
    let m = ComplexMatrix::from_row_slice(2, &[p0, c01, c01.conj(), p1])?;
    DensityMatrix::new(m)
}

/// Trajectory sampled from [`analytic_amplitude_damping`], carrying the
/// matching model so the analytic state derivative is available.
pub fn analytic_trajectory(
    rho0: &DensityMatrix,
    rate: f64,
    omega: f64,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    let model = LindbladModel::amplitude_damping(rate, omega)?;
    let steps = grid_steps(t_max, dt)?;
    let states = (0..=steps)
        .map(|k| analytic_amplitude_damping(rho0, rate, omega, k as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::with_model(0.0, dt, states, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_exponential_antihermitian;
    use crate::sampling;
    use nalgebra::DVector;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decay_of_excited_state() {
        let gamma = 1.3;
        let model = LindbladModel::amplitude_damping(gamma, 0.0).unwrap();
        let rhs = lindblad_rhs(&model, &DensityMatrix::basis(2, 1), 0.0).unwrap();
        let expected = (&pauli::projector(0) - &pauli::projector(1)).scale(gamma);
        assert!(rhs.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn closed_limit_is_von_neumann() {
        let omega = 0.8;
        let h = pauli::z().scale(omega / 2.0);
        let model = LindbladModel::closed(TimeDependentObservable::constant(h.clone()).unwrap());
        let plus = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let rho = DensityMatrix::pure(&plus).unwrap();
        let rhs = lindblad_rhs(&model, &rho, 0.0).unwrap();
        let expected = crate::linalg::commutator(&h, rho.matrix()).unwrap() * -I;
        assert!(rhs.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn coherence_rate() {
        let (gamma, omega) = (0.7, 1.9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho0 = sampling::random_density_matrix(&mut rng, 2, 0.1);
        let rho = analytic_amplitude_damping(&rho0, gamma, omega, 0.4).unwrap();
        let model = LindbladModel::amplitude_damping(gamma, omega).unwrap();
        let rhs = lindblad_rhs(&model, &rho, 0.4).unwrap();
        let expected = -C64::new(gamma / 2.0, omega) * rho.matrix()[(0, 1)];
        assert!((rhs[(0, 1)] - expected).norm() < 1e-15);
    }

    #[test]
    fn rk4_excited_population() {
        let model = LindbladModel::amplitude_damping(1.0, 0.0).unwrap();
        let traj = integrate(&model, &DensityMatrix::basis(2, 1), 1.0, 1e-3).unwrap();
        assert_eq!(traj.len(), 1001);
        let last = traj.states().last().unwrap();
        assert!((last.matrix()[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rk4_matches_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = sampling::random_hermitian(&mut rng, 3, 0.5);
        let model = LindbladModel::closed(TimeDependentObservable::constant(h.clone()).unwrap());
        let rho0 = sampling::random_density_matrix(&mut rng, 3, 0.1);
        let traj = integrate(&model, &rho0, 2.0, 1e-3).unwrap();
        let u = matrix_exponential_antihermitian(&h, 2.0).unwrap();
        let exact = &(&u * rho0.matrix()) * &u.adjoint();
        assert!(traj.states().last().unwrap().matrix().max_abs_diff(&exact) < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Richardson check against the closed form: halving dt cuts the error ~16x.
        let (gamma, omega, t_end) = (1.0, 1.0, 2.0);
        let psi = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let model = LindbladModel::amplitude_damping(gamma, omega).unwrap();
        let exact = analytic_amplitude_damping(&rho0, gamma, omega, t_end).unwrap();
        let err = |dt: f64| {
            let traj = integrate(&model, &rho0, t_end, dt).unwrap();
            traj.states().last().unwrap().matrix().max_abs_diff(exact.matrix())
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() <= 0.2 * 16.0, "ratio {ratio}");
    }

    #[test]
    fn analytic_solution_limits() {
        let gamma = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho0 = sampling::random_density_matrix(&mut rng, 2, 0.0);
        let at_zero = analytic_amplitude_damping(&rho0, gamma, 0.5, 0.0).unwrap();
        assert_eq!(at_zero.matrix(), rho0.matrix());
        let late = analytic_amplitude_damping(&rho0, gamma, 0.5, 50.0 / gamma).unwrap();
        assert!(late.matrix().max_abs_diff(&pauli::projector(0)) < 1e-10);

        let t = 0.6;
        let excited = analytic_amplitude_damping(&DensityMatrix::basis(2, 1), gamma, 0.0, t).unwrap();
        let x = (-gamma * t).exp();
        let expected = ComplexMatrix::from_real_rows(&[&[1.0 - x, 0.0], &[0.0, x]]).unwrap();
        assert!(excited.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn analytic_solution_rejects_bad_input() {
        assert!(analytic_amplitude_damping(&DensityMatrix::basis(2, 1), -1.0, 0.0, 1.0).is_err());
        assert!(matches!(
            analytic_amplitude_damping(&DensityMatrix::maximally_mixed(3), 1.0, 0.0, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn integrate_rejects_bad_grid() {
        let model = LindbladModel::amplitude_damping(1.0, 0.0).unwrap();
        let rho = DensityMatrix::basis(2, 1);
        assert!(integrate(&model, &rho, 1.0, 0.0).is_err());
        assert!(integrate(&model, &rho, 1e-4, 1e-3).is_err());
    }

    #[test]
    fn integrate_aborts_on_positivity_loss() {
        // A huge step on a strongly damped model overshoots the populations.
        let model = LindbladModel::amplitude_damping(50.0, 0.0).unwrap();
        let err = integrate(&model, &DensityMatrix::basis(2, 1), 1.0, 0.1).unwrap_err();
        assert!(
            matches!(err, Error::PositivityViolation { .. } | Error::StateAt { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn populations_sum_rate_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho0 = sampling::random_density_matrix(&mut rng, 2, 0.2);
        let traj = analytic_trajectory(&rho0, 1.0, 0.5, 1.0, 1e-3).unwrap();
        for k in 1..traj.len() - 1 {
            let before = traj.states()[k - 1].spectrum().eigenvalues;
            let after = traj.states()[k + 1].spectrum().eigenvalues;
            let sum: f64 = before
                .iter()
                .zip(&after)
                .map(|(a, b)| (b - a) / (2.0 * traj.dt()))
                .sum();
            assert!(sum.abs() < 1e-8);
        }
    }

    fn random_model(rng: &mut ChaCha8Rng, dim: usize) -> LindbladModel {
        let h = sampling::random_hermitian(rng, dim, 1.0);
        let jumps = (0..rng.random_range(1..=2))
            .map(|_| sampling::random_complex(rng, dim, 0.5))
            .collect();
        LindbladModel::new(dim, Some(TimeDependentObservable::constant(h).unwrap()), jumps)
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rhs_is_traceless_and_hermitian(seed in any::<u64>(), dim in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model = random_model(&mut rng, dim);
            let rho = sampling::random_density_matrix(&mut rng, dim, 0.0);
            let rhs = lindblad_rhs(&model, &rho, 0.3).unwrap();
            prop_assert!(rhs.trace().norm() <= 1e-12);
            prop_assert!(rhs.adjoint().max_abs_diff(&rhs) <= 1e-12);
        }
    }
}
