//! Decision procedures for partial orders on the cone of real positive
//! semidefinite matrices.
//!
//! The crate covers the Löwner order, the minus (rank-subtractivity) order and
//! the star family, congruence canonical forms including the simultaneous
//! reduction of a minus-comparable pair to `(E_r, E_s)`, empirical checks for
//! order-preserving maps, and the linear-model criteria built on top of them.
//!
//! Everything is `no_std` + `alloc`. Every floating-point decision is driven by
//! a single [`ToleranceConfig`].

#![no_std]

extern crate alloc;

pub mod canonical;
mod error;
pub mod linmodels;
pub mod matrix;
pub mod numkernel;
pub mod orders;
pub mod preservers;
pub mod sampling;
pub mod special;
mod tol;

pub use error::{Error, Result, SimCongStage};
pub use matrix::{Matrix, PsdMatrix, SymMatrix};
pub use tol::ToleranceConfig;
