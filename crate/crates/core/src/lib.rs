//! Fluctuation-growth bounds for observables of open quantum systems.
//!
//! Dense complex linear algebra, Lindblad and Kraus dynamics, observable
//! statistics along trajectories, and scenario files that bundle a model,
//! an observable and the inequalities to check.

pub mod channels;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod sampling;
pub mod scenario;
pub mod state;
pub mod stats;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use observables::{CoefficientFunction, TimeDependentObservable};
pub use state::DensityMatrix;
