//! Hybrid automata modeling and verification core.
//!
//! Everything here works over exact rationals and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod compose;
pub mod kripke;
pub mod linsys;
pub mod model;
pub mod rational;
pub mod samples;
pub mod semantics;
pub mod buchi;
pub mod graph;
pub mod ltl;
pub mod regions;
pub mod mcheck;
pub mod bisim;
pub mod reduce;
pub mod minsky;
