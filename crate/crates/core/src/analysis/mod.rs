//! Diagnostics: BCH expansion, shadow Hamiltonians, commutant test, drift and
//! convergence experiments, correction growth and the time-step bound.

pub mod bch;
pub mod bound;
pub mod commutant;
pub mod drift;
pub mod fit;
pub mod growth;
pub mod order;
pub mod shadow;

pub use bch::{bch_truncated, DtSeries, MAX_BCH_ORDER};
pub use bound::min_timestep_bound;
pub use commutant::{commutant_test, commutant_test_with, CommutantResult, DegeneracyTolerances};
pub use drift::{drift_experiment, DriftReport};
pub use fit::{linear_fit, LineFit};
pub use growth::{correction_growth_fit, GrowthFit};
pub use order::{observed_order, OrderEstimate, OrderReport};
pub use shadow::{
    bch_corrections, log_shadow, shadow_from_log_ladder, shadow_hamiltonian, Correction, LadderFit,
    ShadowHamiltonian,
};
