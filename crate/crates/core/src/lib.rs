//! Exact geometry of self-similar subsets of the real line.
//!
//! The crate computes the Minkowski dimension, gaps, parallel volumes and
//! feasible open sets of attractors of iterated function systems of
//! similarities on ℝ, and decides Minkowski measurability through the
//! renewal-type criterion function on `(rg, g]`.

pub mod cli;
pub mod digit;
pub mod error;
pub mod gaps;
pub mod ifs;
pub mod measurability;
pub mod neighbor;
pub mod numerics;
pub mod openset;

pub use error::{Error, Result};
pub use ifs::{Ifs, Similarity, Word};
pub use numerics::{Enclosure, Interval, IntervalSet, Rational};
