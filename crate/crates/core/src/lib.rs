//! Interface motion in a periodic two-phase lattice medium.
//!
//! The crate evaluates the minimizing-movement scheme for lattice perimeter
//! energies with inclusions of strong bonds, reduces the motion of a
//! rectangle side to a one-dimensional congruence-constrained problem, and
//! integrates the resulting homogenized rectangle evolution exactly.

pub mod closed_form;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod limit_motion;
pub mod numeric;
pub mod orbit;
pub mod validation;

pub use error::{Error, Result};
pub use lattice::{AlphaRectangle, CellRect, LatticeSet, MediumSpec, Side};
pub use numeric::Rational;
