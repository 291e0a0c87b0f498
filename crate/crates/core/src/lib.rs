//! Phase-shift fault injection for quantum circuits.
//!
//! The crate is `no_std` (it needs `alloc`) and free of IO. It covers the
//! circuit model and benchmark generators ([`circuit`]), exact and sampled
//! statevector execution ([`sim`]), layout and SWAP routing onto a coupling
//! map ([`transpile`]), injector placement and campaign planning
//! ([`inject`]), and the vulnerability metric with its aggregations
//! ([`analysis`]).
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod angle;
pub mod circuit;
mod error;
pub mod inject;
pub mod sim;
pub mod transpile;

pub use error::{Error, Result};
