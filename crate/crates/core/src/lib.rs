//! Exact algebra for endomorphism semigroups of free and nilpotent algebras.

pub mod bijection;
pub mod endo;
pub mod gsolve;
pub mod matrix;
pub mod ncpoly;
pub mod ring;
pub mod sample;
pub mod selftest;

pub use ring::{parse_ring, Elem, Ring, RingAutomorphism, RingError};
