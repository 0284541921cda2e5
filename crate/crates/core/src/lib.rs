pub mod bmo;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod numerics;
pub mod operators;
pub mod potential;
pub mod semigroup;
pub mod twoweight;
pub mod weights;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
