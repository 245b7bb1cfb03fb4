//! Integer-valued polynomials under exponential growth constraints.
//!
//! The crate covers exact binomial-basis arithmetic ([`ivp`]), generating
//! functions and quadrature ([`genfunc`]), moment matrices and orthogonal
//! polynomial norms ([`gram`]), logarithmic capacity of two disks
//! ([`capacity`]) and lattice-point enumeration ([`lattice`]).

pub mod acceptance;
pub mod capacity;
pub mod error;
pub mod genfunc;
pub mod gram;
pub mod ivp;
pub mod lattice;
pub mod real;

pub use error::{Error, Result};
