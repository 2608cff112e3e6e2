//! Core algorithms for two-stage stochastic service network design.
//!
//! The pipeline: build a cyclic space-time [`network::Instance`], sample demand
//! scenarios from a triangular distribution ([`scenarios`]), group scenarios
//! into possibly overlapping bundles with fuzzy c-means or k-means
//! ([`bundling`]), translate everything into linear programs
//! ([`formulation`]), and drive the bundle-decomposed progressive hedging
//! heuristic ([`pha`]) on top of the built-in simplex/branch-and-bound engine
//! ([`milp`]).
//!
//! The crate is `no_std` (with `alloc`): it performs no IO and reads no
//! clocks. Wall-clock budgets are injected through [`clock::Clock`].

// TEMP-DIAG: std for instrumentation
// #![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bundling;
pub mod clock;
pub mod error;
pub mod formulation;
pub mod generate;
mod math;
pub mod milp;
pub mod network;
pub mod pha;
pub mod scenarios;

pub use error::Error;
