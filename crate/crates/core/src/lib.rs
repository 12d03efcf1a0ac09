//! Time-discretization schemes for quantum Hamiltonian dynamics and the
//! diagnostics that expose their energy drift: BCH shadow Hamiltonians, a
//! commutant test for quantum non-integrability, drift and convergence-order
//! experiments, and a classical leapfrog counterpart.

// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod operator;
pub mod fourier;
pub mod models;
pub mod schemes;
pub mod analysis;
pub mod classical;

pub use error::{Error, Result};
pub use operator::{CMatrix, CVector, HermitianOperator, StateVector, UnitaryOperator};
pub use models::{GridModel, Potential, SplitHamiltonian, ToyModel};
pub use schemes::{CompositionScheme, Integrator, Order, Propagator, SchemeSpec, Stage};
pub use analysis::{DriftReport, OrderEstimate, ShadowHamiltonian};
pub use classical::ClassicalState;

/// Library version recorded in experiment sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the seeded generator behind every random model and state.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9)";
