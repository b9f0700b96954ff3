//! Real-gas (Redlich–Kwong) thermodynamics built from the Massieu–Planck
//! potential, vapour–liquid coexistence, and steady adiabatic filtration
//! with point sources reduced to the Laplace equation.

// `!(x > 0.0)` is the house idiom for rejecting NaN together with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eos;
pub mod error;
pub mod filtration;
pub mod format;
pub mod isentrope;
pub mod numerics;
pub mod phase;

pub use eos::{CriticalPoint, GasModel, GasParams, KappaForm, StatePoint};
pub use error::{Error, Result};
