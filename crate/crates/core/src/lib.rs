//! Photon-pair blockade in a voltage-biased Josephson-photonics circuit: a
//! superconducting qubit and two microwave resonators pumped through a
//! dc-biased junction.
//!
//! Frequencies are angular (rad/ns) inside the library and ordinary GHz at the
//! configuration boundary; times are in ns.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod operators;
pub mod units;
