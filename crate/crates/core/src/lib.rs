//! Continuous-time quantum walks on the integer lattice.
//!
//! A walk is generated by a translation-invariant self-adjoint operator `A`,
//! described by its real Fourier multiplier ([`TrigSymbol`]). The crate evolves
//! finite-support states with `e^{-itA}`, builds the rescaled position
//! distributions `P_t[ψ_0]` (atoms at `n/t`), the limit measure they converge
//! to (the distribution of the group velocity `-a'(θ)` under `|F*ψ_0|²`), and
//! the diagnostics that measure the convergence.

pub mod bessel;
pub mod cli;
pub mod converge;
pub mod error;
pub mod evolve;
pub mod limit;
pub mod state;
pub mod symbol;

pub use converge::{
    claim_residual, convergence_table, ks_distance, ks_distance_to_cdf, phi_empirical, phi_limit,
    ConvergenceReport, ReportRow,
};
pub use error::{Result, WalkError};
pub use evolve::{
    choose_grid_size, dense_oracle_evolve, evolve, evolve_auto, position_distribution,
};
pub use limit::{arcsine_cdf, limit_measure, rescaled_measure, PointMeasure};
pub use state::{from_torus, to_torus, LatticeState, TorusField};
pub use symbol::TrigSymbol;
