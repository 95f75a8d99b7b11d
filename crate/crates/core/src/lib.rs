//! Minmatrix workbench for non-iterative modal logics over K.
//!
//! Formulas of modal degree at most `d` in `v` variables are normalized to
//! minmatrices (sets of minterms) of the finite context K[v,d]. Level-0
//! uniform substitutions act on these sets; the systems of K[v,1] are the
//! unions of prime orbits that survive every substitution, and they form a
//! lattice addressed by coordinates `(plane, x, y)`.

pub mod axiom;
pub mod bits;
pub mod context;
pub mod error;
pub mod formula;
pub mod kripke;
pub mod lattice;
pub mod minmatrix;
pub mod orbit;
pub mod substitution;

pub use context::Context;
pub use error::{Error, Result};
pub use formula::{parse, Formula};
pub use lattice::{Axis, OrbitSet, Plane, SystemCoord};
pub use minmatrix::{normalize, Minmatrix};
pub use substitution::Substitution;
