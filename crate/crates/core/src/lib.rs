//! Set-partition lattice algebra, diagonal sets, Lévy path simulation and
//! discrete multiple integrals with the Hu–Meyer decomposition.
//!
//! The measure and integral engines are generic over [`Scalar`]; use
//! [`Rational`] when an identity should hold with `==`, `f64` otherwise.
//! The simulator produces `f64` paths.

pub mod diagonal;
pub mod error;
pub mod integrals;
pub mod levy;
pub mod measures;
pub mod partition;
pub mod scalar;
pub mod special;

pub use diagonal::{CellRectangle, CellSet};
pub use error::{Error, Result};
pub use integrals::{GridFunction, HuMeyerTerm, Symmetry};
pub use levy::{JumpLaw, LevyModel, LevyPath, MomentTable};
pub use measures::{AtomFamily, DiagonalSpec};
pub use partition::{Partition, Permutation, TypeVector};
pub use scalar::Scalar;

/// Exact scalar used by the identity checks.
pub type Rational = num_rational::BigRational;

pub type GridFunction64 = GridFunction<f64>;
pub type GridFunctionQ = GridFunction<Rational>;
pub type AtomFamily64 = AtomFamily<f64>;
pub type AtomFamilyQ = AtomFamily<Rational>;
