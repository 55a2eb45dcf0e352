//! Minkowski measurability: the criterion function `p`, its extrema, the
//! pluriphase check and the overall verdict.

pub mod pfunction;
pub mod pluriphase;
pub mod verdict;

pub use pfunction::{amplitude, amplitude_of, p_extrema, p_function, p_truncated, Breakpoint, Extrema, Piece, PiecewisePower};
pub use pluriphase::{pluriphase_check, PluriphaseReport};
pub use verdict::{verdict, OscEvidence, OscStatus, Status, Verdict, VerdictOptions};
