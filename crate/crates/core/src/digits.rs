//! Base-`p` digit strings of coset representatives and their run structure.
//!
//! A residue `b mod p^n` is stored as its `n` digits, least significant
//! first.  The *run structure* records the maximal runs of zero digits
//! around the nonzero ones: `digits = 0^{m_1} ★ 0^{m_2} ★ … ★ 0^{m_l}` with
//! `l − 1` nonzero digits `★` and `m_i ≥ 0`, so `Σ m_i + (l − 1) = n`.
//! Adjacent nonzero digits show up as interior runs of length zero, and the
//! parities of the runs are what decide whether — and where — a distribution
//! value survives.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{is_prime, pow_big};

/// Ceiling on digit-string lengths; far above anything the matrix layers
/// accept, but it keeps a stray huge `n` from allocating unboundedly.
pub const MAX_DIGITS: u32 = 1 << 20;

/// The base-`p` digits of a residue `b mod p^n`, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    p: u32,
    digits: Vec<u32>,
}

/// Computes the digit string of `b mod p^n`.  Negative `b` and `b ≥ p^n`
/// are normalized to the canonical residue first; `n ≥ 1`.
pub fn digits(b: &BigInt, n: u32, p: u32) -> Result<DigitString> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if !(1..=MAX_DIGITS).contains(&n) {
        return Err(Error::DepthOutOfRange {
            n,
            min: 1,
            max: MAX_DIGITS,
        });
    }
    let pn = BigInt::from(pow_big(p, n));
    let mut rem = b
        .mod_floor(&pn)
        .to_biguint()
        .expect("canonical residues are nonnegative");
    let pb = BigUint::from(p);
    let mut ds = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (q, r) = rem.div_rem(&pb);
        ds.push(r.to_u32().expect("digit is below p"));
        rem = q;
    }
    Ok(DigitString { p, digits: ds })
}

impl DigitString {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// The length `n` of the string.
    pub fn n(&self) -> u32 {
        self.digits.len() as u32
    }

    /// Digits, least significant first.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// The canonical residue the digits spell out.
    pub fn value(&self) -> BigUint {
        let p = BigUint::from(self.p);
        let mut acc = BigUint::from(0u32);
        for d in self.digits.iter().rev() {
            acc = acc * &p + BigUint::from(*d);
        }
        acc
    }

    /// True when two nonzero digits sit next to each other.
    pub fn has_adjacent_nonzero(&self) -> bool {
        self.digits.windows(2).any(|w| w[0] != 0 && w[1] != 0)
    }

    /// The zero-run decomposition.
    pub fn run_structure(&self) -> RunStructure {
        let mut runs = Vec::new();
        let mut current = 0u64;
        for &d in &self.digits {
            if d == 0 {
                current += 1;
            } else {
                runs.push(current);
                current = 0;
            }
        }
        runs.push(current);
        RunStructure { runs }
    }
}

impl Serialize for DigitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.digits.serialize(s)
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Zero-run lengths `m_1, …, m_l` of a digit string; `l − 1` is the number
/// of nonzero digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStructure {
    runs: Vec<u64>,
}

impl RunStructure {
    /// The run lengths, in digit order.
    pub fn runs(&self) -> &[u64] {
        &self.runs
    }

    /// The number of blocks `l`.
    pub fn block_count(&self) -> usize {
        self.runs.len()
    }

    /// The number of nonzero digits, `l − 1`.
    pub fn nonzero_count(&self) -> usize {
        self.runs.len() - 1
    }

    /// Interior runs `m_2, …, m_{l−1}` — the gaps strictly between nonzero
    /// digits.
    pub fn interior_runs(&self) -> &[u64] {
        if self.runs.len() <= 2 {
            &[]
        } else {
            &self.runs[1..self.runs.len() - 1]
        }
    }

    /// The boolean nonzero-pattern the runs encode, for round-trip checks.
    pub fn nonzero_pattern(&self) -> Vec<bool> {
        let mut pat = Vec::new();
        for (i, &m) in self.runs.iter().enumerate() {
            pat.extend(std::iter::repeat_n(false, m as usize));
            if i + 1 < self.runs.len() {
                pat.push(true);
            }
        }
        pat
    }
}

impl Serialize for RunStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.runs.serialize(s)
    }
}

impl fmt::Display for RunStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(b: i64, n: u32, p: u32) -> DigitString {
        digits(&BigInt::from(b), n, p).unwrap()
    }

    #[test]
    fn digit_expansion() {
        assert_eq!(ds(10, 3, 3).digits(), &[1, 0, 1]);
        assert_eq!(ds(4, 2, 3).digits(), &[1, 1]);
        assert_eq!(ds(0, 4, 2).digits(), &[0, 0, 0, 0]);
        // normalization of negatives and overflow residues
        assert_eq!(ds(-1, 2, 3).digits(), &[2, 2]);
        assert_eq!(ds(29, 2, 3).digits(), ds(2, 2, 3).digits());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            digits(&BigInt::from(1), 2, 6),
            Err(Error::NonPrime(6))
        ));
        assert!(matches!(
            digits(&BigInt::from(1), 0, 3),
            Err(Error::DepthOutOfRange { .. })
        ));
    }

    #[test]
    fn run_structures() {
        // 10 = [1, 0, 1] in base 3: no leading zeros, one interior zero,
        // no trailing zeros.
        assert_eq!(ds(10, 3, 3).run_structure().runs(), &[0, 1, 0]);
        assert_eq!(ds(0, 3, 3).run_structure().runs(), &[3]);
        assert_eq!(ds(4, 2, 3).run_structure().runs(), &[0, 0, 0]);
        assert_eq!(ds(9, 4, 3).run_structure().runs(), &[2, 1]);
        let rs = ds(10, 3, 3).run_structure();
        assert_eq!(rs.block_count(), 3);
        assert_eq!(rs.nonzero_count(), 2);
        assert_eq!(rs.interior_runs(), &[1]);
        assert_eq!(ds(4, 2, 3).run_structure().interior_runs(), &[0]);
        assert_eq!(ds(9, 4, 3).run_structure().interior_runs(), &[] as &[u64]);
    }

    #[test]
    fn adjacency_detection() {
        assert!(ds(4, 2, 3).has_adjacent_nonzero());
        assert!(!ds(10, 3, 3).has_adjacent_nonzero());
        assert!(!ds(0, 5, 2).has_adjacent_nonzero());
        assert!(ds(3, 2, 2).has_adjacent_nonzero());
    }

    proptest! {
        #[test]
        fn value_roundtrip(b in 0i64..100_000, pi in 0usize..3, n in 1u32..=10) {
            let p = [2u32, 3, 5][pi];
            let d = digits(&BigInt::from(b), n, p).unwrap();
            let pn = BigInt::from(pow_big(p, n));
            let expected = BigInt::from(b).mod_floor(&pn).to_biguint().unwrap();
            prop_assert_eq!(d.value(), expected);
        }

        #[test]
        fn run_invariants(b in -50_000i64..50_000, pi in 0usize..3, n in 1u32..=12) {
            let p = [2u32, 3, 5][pi];
            let d = digits(&BigInt::from(b), n, p).unwrap();
            let rs = d.run_structure();
            let total: u64 = rs.runs().iter().sum::<u64>() + rs.nonzero_count() as u64;
            prop_assert_eq!(total, u64::from(n));
            let pattern: Vec<bool> = d.digits().iter().map(|&x| x != 0).collect();
            prop_assert_eq!(rs.nonzero_pattern(), pattern);
        }
    }
}
