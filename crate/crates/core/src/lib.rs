//! Exact arithmetic for unimodular integral lattices.
//!
//! This crate implements the computational primitives needed to classify
//! unimodular lattices by enumerating cyclic Kneser d-neighbors of `Z^n`:
//!
//! - exact integer matrices: Hermite normal form, determinants, GF(2) algebra
//!   ([`matrix`]);
//! - lattices as integer Gram matrices with optional rational embeddings,
//!   short-vector enumeration and norm counts ([`lattice`]);
//! - ADE root system identification and Weyl group orders ([`roots`]);
//! - the cyclic d-neighbor construction `N_d(x; eps)`, line normalization,
//!   typed enumeration and line deduplication ([`neighbors`]);
//! - characteristic vectors, exceptional lattices and companions
//!   ([`charvec`]);
//! - the BV graph invariant with its 64-bit hash ([`bv`]);
//! - LLL plus a randomized search for bases of small-norm vectors
//!   ([`reduce`]);
//! - automorphism group orders by backtracking over short vectors
//!   ([`isometry`]);
//! - exact-rational mass ledgers and the biased candidate streams used by
//!   the hunt drivers ([`hunt`]).
//!
//! Everything here is pure and deterministic: no IO, no floating-point
//! results (floats appear only as conservative pruning hints inside the
//! short-vector enumerator, every emitted vector is re-checked exactly).
//! The crate is `no_std` + `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod matrix;
pub mod lattice;
pub mod lll;
pub mod roots;
pub mod neighbors;
pub mod charvec;
pub mod bv;
pub mod reduce;
pub mod isometry;
pub mod hunt;

mod fp;

pub use lattice::{Lattice, LatticeError, VectorSet};
pub use neighbors::NeighborSpec;
pub use roots::{RootSystem, RootSymbol};

use num_bigint::BigInt;
use num_rational::Ratio;

/// Exact rational number used for masses and bounds.
pub type Rational = Ratio<BigInt>;

/// Integer vector in lattice coordinates.
pub type Coords = alloc::vec::Vec<i64>;
