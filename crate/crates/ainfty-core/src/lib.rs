//! Exact-arithmetic computer algebra for finite-dimensional A-infinity and
//! cyclic A-infinity algebras.
//!
//! Everything is computed over exact scalars (rationals, optionally Gaussian
//! rationals), so identity checks are tolerance-zero: a defect tensor either
//! is the zero tensor or it is not, and failures come with a witness entry.
//!
//! The crate is organized around a small stack of layers:
//!
//! - [`scalar`] / [`graded`]: exact scalars, graded bases, sparse elements,
//!   sparse structure-constant tensors ([`graded::MultiMap`]) and the Koszul
//!   sign engine.
//! - [`algebra`]: A-infinity structures, morphisms, odd symplectic forms,
//!   cyclicity, and homotopies between morphisms, all as defect computations.
//! - [`splitting`]: Hodge-Kodaira decompositions of the underlying complex,
//!   including symplectically compatible and propagator-style constructions.
//! - [`trees`]: rooted planar trees, grafting, and cyclic (root-forgotten)
//!   tree classes with their symmetry factors.
//! - [`transfer`]: minimal models by tree summation and by recursion, the
//!   full decomposition isomorphism, cyclic transfer, tree amplitudes, and
//!   effective actions.
//! - [`mc`]: formal Maurer-Cartan theory in a bookkeeping parameter, with
//!   obstructions, pushforwards, and gauge transformations.
//! - [`ncgeo`]: cyclic noncommutative polynomials, odd Poisson brackets,
//!   the noncommutative de Rham complex with its contracting homotopy,
//!   Darboux normalization, and the master-equation dual of the Stasheff
//!   identities.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod graded;
pub mod mc;
pub mod models;
pub mod ncgeo;
pub mod scalar;
pub mod splitting;
pub mod transfer;
pub mod trees;

mod matrix;

pub use algebra::{AInfinity, Morphism, MorphismHomotopy, SymplecticForm};
pub use graded::{Element, GradedBasis, MultiMap};
pub use scalar::Scalar;
pub use splitting::Splitting;
pub use trees::{CyclicClass, PlanarTree};

use alloc::string::String;

/// Error type shared by all constructors and operations in this crate.
///
/// `Input` marks precondition violations (arity mismatches, unknown names,
/// malformed data); `Structure` marks a violated mathematical invariant and
/// carries a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Input(String),
    Structure(String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Structure(msg) => write!(f, "structural error: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
