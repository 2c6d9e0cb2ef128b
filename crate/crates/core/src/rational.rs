//! Exact rational scalars, p-adic valuations, and the extended value line.
//!
//! The coefficient field everywhere in this crate is `Q`, represented by
//! [`Rational`] (arbitrary-precision, always reduced, positive denominator).
//! Valuations take values in `Q ∪ {∞}`, modeled by [`ExtValuation`];
//! half-integers show up as soon as the quadratic ring is ramified, which is
//! why the finite branch carries a full rational and not an integer.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.  `num_rational` maintains exactly the
/// invariants we need: numerator and denominator coprime after every
/// operation, denominator strictly positive, zero stored as `0/1`.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.  Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a rational from the serialized form `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let body = s.trim();
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let n = BigInt::from_str(numer).map_err(|e| Error::Parse(format!("rational {s:?}: {e}")))?;
    let d = match denom {
        Some(d) => BigInt::from_str(d).map_err(|e| Error::Parse(format!("rational {s:?}: {e}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("rational {s:?}: zero denominator")));
    }
    Ok(Rational::new(n, d))
}

/// Deterministic primality test by trial division; `u32` inputs keep this
/// comfortably cheap.
pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    if p.is_multiple_of(3) {
        return p == 3;
    }
    let mut d = 5u64;
    let p = u64::from(p);
    while d * d <= p {
        if p % d == 0 || p % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Exact multiplicity of `p` in a nonzero integer.
pub fn int_vp(n: &BigInt, p: u32) -> u64 {
    assert!(!n.is_zero(), "valuation of the zero integer is infinite");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0u64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational: multiplicity of `p` in the numerator
/// minus multiplicity in the denominator, and `∞` at zero.
///
/// Rejects non-prime `p`: the multiplicative law `v(xy) = v(x) + v(y)` is
/// what downstream code relies on, and it fails for composite moduli.
pub fn vp(r: &Rational, p: u32) -> Result<ExtValuation> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if r.is_zero() {
        return Ok(ExtValuation::Infinity);
    }
    let v = int_vp(r.numer(), p) as i64 - int_vp(r.denom(), p) as i64;
    Ok(ExtValuation::finite_int(v))
}

/// A valuation value: a rational number or `+∞`.
///
/// `∞` compares greater than every finite value and absorbs addition, which
/// matches the usual conventions `v(0) = ∞` and `v(0·x) = ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtValuation {
    Finite(Rational),
    Infinity,
}

impl ExtValuation {
    /// Finite integer value.
    pub fn finite_int(v: i64) -> Self {
        ExtValuation::Finite(rat(v))
    }

    /// Finite value `n/d`.
    pub fn finite_ratio(n: i64, d: i64) -> Self {
        ExtValuation::Finite(ratio(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValuation::Infinity)
    }

    /// The finite value, if any.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExtValuation::Finite(r) => Some(r),
            ExtValuation::Infinity => None,
        }
    }

    /// Halves the value (used when passing from a norm valuation down to the
    /// element itself in a ramified quadratic extension).
    pub fn half(self) -> Self {
        match self {
            ExtValuation::Finite(r) => ExtValuation::Finite(r / rat(2)),
            ExtValuation::Infinity => ExtValuation::Infinity,
        }
    }

    /// Minimum of two valuations.
    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtValuation::*;
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for ExtValuation {
    type Output = ExtValuation;

    fn add(self, other: ExtValuation) -> ExtValuation {
        use ExtValuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinity,
        }
    }
}

impl fmt::Display for ExtValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValuation::Finite(r) => write!(f, "{r}"),
            ExtValuation::Infinity => write!(f, "inf"),
        }
    }
}

/// `p^n` as a `u64`, or `None` on overflow.  Degree guards elsewhere keep the
/// interesting range far below this, but the check is explicit.
pub fn pow_u64(p: u32, n: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(u64::from(p))?;
    }
    Some(acc)
}

/// `p^n` as an arbitrary-precision integer.
pub fn pow_big(p: u32, n: u32) -> BigUint {
    BigUint::from(p).pow(n)
}

/// True iff `n` is a perfect square; returns the root.
pub fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}
