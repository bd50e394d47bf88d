//! Nonlinear nonreciprocal two-level Landau-Zener-Stückelberg-Majorana
//! dynamics.
//!
//! * [`model`]: parameters, drive and mean-field Hamiltonian
//! * [`spectrum`]: self-consistent eigenvalues, reality classification, branch tracking
//! * [`dynamics`]: biorthogonal evolution, projective (Bloch) representation, trapping, AA phase
//! * [`weakcoupling`]: Dirac-picture approximation and interference conditions
//! * [`sweep`]: parallel parameter grids and their on-disk formats

// `!(a < b)` deliberately rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod ode;
pub mod spectrum;
pub mod sweep;
pub mod weakcoupling;

pub use error::{Error, Result};
pub use model::{drive_gamma, hamiltonian_at, nonlinear_feedback, BiorthState, HamiltonianMatrix, ModelParams, TunnelingClass};
pub use ode::IntegratorOptions;
