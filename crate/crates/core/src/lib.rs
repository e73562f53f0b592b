//! Exact sublattices of ℤ², coverings of ℤ² by lattices, and binary forms
//! with dihedral symmetry.
pub mod arith;
pub mod covering;
pub mod d4;
pub mod forms;
pub mod json;
pub mod lattice;
pub mod suites;

pub use arith::{Int, Mat2, Rat, RatMat2, Vec2};
pub use covering::{CoverError, CoverReport, Covering};
pub use forms::{BinaryForm, FormError, GammaParams, T2Config};
pub use lattice::{Congruence, CongruenceSystem, Lattice, LatticeError};
