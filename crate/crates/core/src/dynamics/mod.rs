//! Continuous-time evolution: master equation, trajectories, short-time
//! propagators and eigenvector flow.

pub mod eigenflow;
pub mod lindblad;
pub mod propagators;
pub mod trajectory;

pub use eigenflow::{
    extract_pseudo_hamiltonian, mean_rate_decomposition, EigenvectorFlow, MeanRateDecomposition,
};
pub use lindblad::{
    analytic_amplitude_damping, analytic_trajectory, integrate, lindblad_rhs, LindbladModel,
};
pub use propagators::{
    dyson_integrals, dyson_propagator, exact_propagator, gauss_legendre, taylor_propagator,
    PropagatorStep, Scheme, TruncationOrder, DEFAULT_QUAD_POINTS,
};
pub use trajectory::{Generator, RhoDotSource, Trajectory};
