//! Numerics for the energy accounting of oracle-based computation.
//!
//! Dense complex linear algebra and density operators, a finite-step Landauer
//! erasure protocol, Simon's problem (instances, oracle, quantum and classical
//! solvers, query-complexity bounds), an energy ledger for whole framework runs,
//! and a qubit-ladder control model.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs plus an explicit RNG, so results are reproducible
//! given a seed.

#![no_std]
// Float supplies libm-backed float methods on toolchains whose core lacks them;
// newer toolchains and std test builds resolve to the inherent methods instead.
#![allow(unused_imports)]

extern crate alloc;

pub mod control;
pub mod error;
pub mod fit;
pub mod gf2;
pub mod landauer;
pub mod ledger;
pub mod linalg;
pub mod quantum;
pub mod rng;
pub mod simon;
pub mod statevector;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use quantum::{DensityOperator, HamiltonianSpec};
