//! Fault-tolerant resource estimation for Fermi-Hubbard simulation on a
//! biplanar honeycomb-code architecture with heralded photonic entanglement.
//!
//! The crate is organized bottom-up:
//!
//! - [`noise`] and [`rus_oracle`]: physical channels and their Monte-Carlo check
//! - [`timing`]: the logical clock
//! - [`surgery`]: patch geometry, error curves, factory conversion
//! - [`synthesis`] and [`trotter`]: per-rotation and per-step cost ledgers
//! - [`plaquette`]: dense verification of the plaquette diagonalization
//! - [`pipeline`] and [`config`]: the self-consistent estimate and its inputs

// NaN-rejecting range checks read more clearly as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod config;
pub mod error;
pub mod noise;
pub mod pipeline;
pub mod plaquette;
pub mod rus_oracle;
pub mod surgery;
pub mod synthesis;
pub mod timing;
pub mod trotter;

pub use error::{Error, Result};
