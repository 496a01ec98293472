//! Exact arithmetic for the integral quadratic lattices that govern K3^[n]-type
//! varieties and cubic fourfolds: Gram-matrix lattices, discriminant forms and
//! gluing, the Beauville–Bogomolov symmetrization identities, odd-p local
//! invariants, short-vector oracles, Newton polygons and prime densities.
//!
//! Everything is computed over arbitrary-precision integers and rationals.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod bb;
pub mod cli;
pub mod density;
pub mod disc;
pub mod enumeration;
pub mod error;
pub mod lattice;
pub mod local;
pub mod matrix;
pub mod moduli;
pub mod newton;

pub use error::{LatticeError, Result};
pub use lattice::{LatticeVector, PointedLattice, QuadLattice};
pub use matrix::IntMatrix;
