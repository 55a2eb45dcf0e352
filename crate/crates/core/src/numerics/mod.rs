//! Exact rational arithmetic, certified enclosures and finite interval unions.

pub mod enclosure;
pub mod interval_set;
pub mod rational;

pub use enclosure::Enclosure;
pub use interval_set::{Interval, IntervalSet};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
