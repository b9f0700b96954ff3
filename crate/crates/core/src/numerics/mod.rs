//! Scalar and 2-D numerical kernels shared by the thermodynamic and
//! filtration layers.
//!
//! Everything here is a pure function of its inputs.

mod diff;
mod gk;
mod newton;
mod quad;
mod root;
mod table;

pub use diff::{central_difference, relative_gap};
pub use gk::{integrate_gk, integrate_gk_scaled, MAX_INTERVALS};
pub use newton::{newton2, NewtonOptions, NewtonSolution};
pub use quad::{integrate, integrate_with_depth, MAX_DEPTH};
pub use root::{find_root, find_root_in, Bracket};
pub use table::{Direction, MonotoneTable};

/// Default absolute tolerance for every kernel.
pub const DEFAULT_TOL: f64 = 1e-10;
