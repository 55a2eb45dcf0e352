//! `ε ↦ λ(F_ε ∩ Γ) = Σ_j min(2ε, d_j)` as an explicit piecewise-linear
//! function with breakpoints `d_j / 2`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::rational::int;
use crate::numerics::Rational;
use crate::openset::GeneratorData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluriphaseReport {
    /// distinct breakpoints `d_j / 2`, increasing
    pub breakpoints: Vec<Rational>,
    /// number of components ending at each breakpoint
    pub multiplicities: Vec<usize>,
    /// slope on `(0, b_1)`, `(b_1, b_2)`, …, `(b_last, ∞)`
    pub slopes: Vec<Rational>,
    lengths: Vec<Rational>,
}

impl PluriphaseReport {
    pub fn eval(&self, eps: &Rational) -> Rational {
        let two_eps = eps * int(2);
        self.lengths
            .iter()
            .fold(Rational::zero(), |acc, d| acc + if &two_eps < d { two_eps.clone() } else { d.clone() })
    }

    /// Count of breakpoints with multiplicity (equals the number of components).
    pub fn total_breakpoints(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

pub fn pluriphase_check(gen: &GeneratorData) -> Result<PluriphaseReport> {
    if !gen.complete {
        return Err(Error::IncompleteComponents);
    }
    let mut halves: Vec<Rational> = gen.lengths.iter().map(|d| d / int(2)).collect();
    halves.sort();
    let mut breakpoints: Vec<Rational> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for h in halves {
        if breakpoints.last() == Some(&h) {
            *multiplicities.last_mut().unwrap() += 1;
        } else {
            breakpoints.push(h);
            multiplicities.push(1);
        }
    }
    let mut active = gen.lengths.len();
    let mut slopes = vec![Rational::from_integer((2 * active).into())];
    for m in &multiplicities {
        active -= m;
        slopes.push(Rational::from_integer((2 * active).into()));
    }
    Ok(PluriphaseReport { breakpoints, multiplicities, slopes, lengths: gen.lengths.clone() })
}
