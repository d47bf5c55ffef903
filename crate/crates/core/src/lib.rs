//! Bound states of the potential V(r) = −a/r + b·exp(−δr)/r.
//!
//! Three independent routes to the same spectrum live here:
//!
//! * [`perturbation`] — closed-form level energies from a third-order
//!   screening expansion around the exactly solvable net-Coulomb problem,
//!   with superpotential-driven wavefunction moderation and convergence
//!   diagnostics;
//! * [`quadrature`] — the same corrections evaluated from their integral
//!   definitions over the Coulomb wavefunctions, confirming (or flagging)
//!   the closed forms;
//! * [`oracle`] — a direct radial eigensolver for the untruncated
//!   potential, bounding the expansion's real error.
//!
//! [`table`] drives grids of (state, b, δ) cells over these engines and
//! serializes them reproducibly for the command-line front end.

// Validation guards use `!(x > 0.0)` on purpose: unlike `x <= 0.0` the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coulomb;
pub mod error;
pub mod integrate;
pub mod oracle;
pub mod params;
pub mod perturbation;
pub mod potential;
pub mod quadrature;
pub mod special;
pub mod state;
pub mod table;
pub mod units;
pub mod verify;

pub use coulomb::CoulombWavefunction;
pub use error::{Error, Result};
pub use params::PotentialParams;
pub use perturbation::{ConvergenceReport, EnergyBreakdown, ModeratedGroundState};
pub use state::QuantumState;
pub use units::UnitSystem;
