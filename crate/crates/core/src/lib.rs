//! Tools for L-weakly dependent sequences: seeded generators, dependence
//! coefficients, block decompositions of partial sums, closed-form
//! exponential and characteristic-function bounds, and a Monte Carlo harness
//! that checks those bounds and the associated limit theorems.

pub mod blocks;
pub mod bounds;
pub mod coefficients;
pub mod error;
pub mod models;
pub mod numerics;
pub mod replicates;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
