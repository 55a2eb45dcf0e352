//! Lattice / nonlattice classification of rational contraction ratios.
//!
//! `log r_i` generate a discrete subgroup of ℝ exactly when the prime
//! exponent vectors of the `r_i` all lie on one line through the origin.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Ifs;
use crate::error::{Error, Result};
use crate::numerics::rational::{gcd_all, pow_int};
use crate::numerics::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeClass {
    /// Every ratio equals `base^k_i`, `0 < base < 1`, `gcd(k_i) = 1`.
    Lattice { base: Rational, exponents: Vec<u64> },
    Nonlattice,
    /// Reserved for inputs whose ratios are not rational.
    Unknown,
}

impl LatticeClass {
    pub fn base(&self) -> Option<&Rational> {
        match self {
            LatticeClass::Lattice { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, LatticeClass::Lattice { .. })
    }
}

/// Signed prime-exponent vector of a positive rational.
fn factor(q: &Rational) -> BTreeMap<BigInt, i64> {
    let mut out = BTreeMap::new();
    add_factors(q.numer(), 1, &mut out);
    add_factors(q.denom(), -1, &mut out);
    out
}

fn add_factors(n: &BigInt, sign: i64, out: &mut BTreeMap<BigInt, i64>) {
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            n /= &p;
            *out.entry(p.clone()).or_insert(0) += sign;
        }
        p += if p == BigInt::from(2) { BigInt::one() } else { BigInt::from(2) };
    }
    if n > BigInt::one() {
        *out.entry(n).or_insert(0) += sign;
    }
}

fn value_of(v: &BTreeMap<BigInt, i64>) -> Rational {
    v.iter().fold(Rational::one(), |acc, (p, e)| acc * pow_int(&Rational::from_integer(p.clone()), *e))
}

pub fn lattice_classify(ifs: &Ifs) -> Result<LatticeClass> {
    classify_ratios(&ifs.ratios())
}

pub fn classify_ratios(ratios: &[Rational]) -> Result<LatticeClass> {
    if ratios.iter().any(|r| !r.is_positive() || r >= &Rational::one()) {
        return Err(Error::invalid("ratio", "ratios must lie in (0,1)"));
    }
    let vectors: Vec<BTreeMap<BigInt, i64>> = ratios.iter().map(factor).collect();
    let first = &vectors[0];
    let g = gcd_all(&first.values().copied().collect::<Vec<_>>());
    // primitive direction with value < 1
    let primitive: BTreeMap<BigInt, i64> = first.iter().map(|(p, e)| (p.clone(), e / g)).collect();

    let mut multiples = Vec::with_capacity(vectors.len());
    for v in &vectors {
        if v.keys().ne(primitive.keys()) {
            return Ok(LatticeClass::Nonlattice);
        }
        let (p0, e0) = primitive.iter().next().expect("ratio < 1 has a prime factor");
        let c = v[p0] / e0;
        if v[p0] % e0 != 0 || primitive.iter().any(|(p, e)| v[p] != c * e) {
            return Ok(LatticeClass::Nonlattice);
        }
        multiples.push(c);
    }
    let primitive_value = value_of(&primitive);
    // all logs share a sign, so all multiples share the sign of log(primitive) vs log(r)
    let sign = if primitive_value < Rational::one() { 1 } else { -1 };
    let multiples: Vec<i64> = multiples.iter().map(|c| c * sign).collect();
    debug_assert!(multiples.iter().all(|c| *c > 0));
    let base_unit = if sign == 1 { primitive_value } else { primitive_value.recip() };
    let g = gcd_all(&multiples);
    let base = pow_int(&base_unit, g);
    let exponents: Vec<u64> = multiples.iter().map(|c| (c / g).to_u64().unwrap()).collect();
    debug_assert!(ratios.iter().zip(&exponents).all(|(r, k)| &pow_int(&base, *k as i64) == r));
    debug_assert_eq!(exponents.iter().fold(0u64, |a, b| a.gcd(b)), 1);
    Ok(LatticeClass::Lattice { base, exponents })
}
