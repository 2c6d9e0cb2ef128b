//! Independent recomputations of the distribution matrix.
//!
//! Two oracles, each avoiding the digit product entirely:
//!
//! 1. [`CoefficientOracle`] / [`mu_oracle`] — coefficient extraction.  The
//!    truncated logarithm matrix has polynomial entries of degree below
//!    `p^n`, so shifting by `x^{−b}` and summing over the `p^n`-th roots of
//!    unity (the window shortcut from [`crate::laurent`]) isolates the
//!    coefficient of `x^b`.
//! 2. [`AveragingOracle`] / [`roots_of_unity_sum`] — literal averaging.
//!    The same sum is carried out term by term: substitute `x ↦ x^j` for
//!    every `j < p^n` with exponents folded modulo `p^n`, accumulate, and
//!    reduce the result by the cyclotomic relation satisfied by a primitive
//!    `p^n`-th root of unity.  The reduced sum must be a scalar; anything
//!    else aborts the process, because it would falsify the identity the
//!    library is built on.  The quadratic growth in `p^n` is capped by an
//!    explicit gate.
//!
//! Both return the matrix `μ(b + p^n·Z_p)` and are compared against the
//! digit-product formula by the verification suite.  The oracle structs
//! front-load the truncated-logarithm computation so that sweeping every
//! coset of a cell pays for it once.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hecke::HeckeData;
use crate::laurent::{constant_term_sum, LaurentMat2};
use crate::logmatrix::log_truncation;
use crate::matrix::QuadMat2;
use crate::poly::PolyQ;
use crate::quad::QuadElem;
use crate::rational::{pow_u64, Rational};

/// Largest `p^n` the literal root-of-unity sweep accepts by default; the
/// work grows like `p^{2n}`, so the gate keeps accidental deep calls from
/// running away.  Use [`roots_of_unity_sum_with_gate`] or
/// [`AveragingOracle::with_gate`] to override.
pub const DEFAULT_ROOTS_GATE: u64 = 243;

fn modulus(p: u32, n: u32) -> Result<u64> {
    pow_u64(p, n)
        .filter(|&pn| pn <= i64::MAX as u64)
        .ok_or(Error::DegreeOverflow {
            p,
            n,
            bound: i64::MAX as u64,
        })
}

fn residue(b: &BigInt, pn: u64) -> u64 {
    b.mod_floor(&BigInt::from(pn))
        .to_u64()
        .expect("residue fits after reduction")
}

/// Coefficient extraction from one truncated logarithm matrix, reusable
/// across every coset of the same depth.
pub struct CoefficientOracle {
    ctx: HeckeData,
    n: u32,
    pn: u64,
    lau: LaurentMat2,
}

impl CoefficientOracle {
    /// Prepare the depth-`n` truncated logarithm matrix.
    pub fn new(ctx: &HeckeData, n: u32) -> Result<Self> {
        let pn = modulus(ctx.p(), n)?;
        let lau = LaurentMat2::from_poly_mat(&log_truncation(ctx, n)?);
        Ok(CoefficientOracle {
            ctx: *ctx,
            n,
            pn,
            lau,
        })
    }

    /// `μ(b + p^n·Z_p)` as the coefficient of `x^b`, extracted by shifting
    /// and averaging over the `p^n`-th roots of unity.
    pub fn value(&self, b: &BigInt) -> Result<QuadMat2> {
        let bbar = residue(b, self.pn);
        let shifted = self.lau.shift_all(-(bbar as i64));
        let inv = Rational::new(BigInt::one(), BigInt::from(self.pn));
        let sum = |i, j| -> Result<QuadElem> {
            Ok(constant_term_sum(shifted.entry(i, j), self.ctx.p(), self.n)?.scale(&inv))
        };
        QuadMat2::new(
            self.ctx.ring(),
            [sum(0, 0)?, sum(0, 1)?, sum(1, 0)?, sum(1, 1)?],
        )
    }
}

/// Recover `μ(b + p^n·Z_p)` as the coefficient of `x^b` in the truncated
/// logarithm matrix, extracted through the root-of-unity window shortcut.
pub fn mu_oracle(ctx: &HeckeData, b: &BigInt, n: u32) -> Result<QuadMat2> {
    CoefficientOracle::new(ctx, n)?.value(b)
}

/// One matrix entry with cleared denominators: the common denominator `D`
/// and integer terms `(e, a, b)` meaning `(a + b·α)/D · x^e`, exponents
/// already folded modulo `p^n`.
struct ClearedEntry {
    den: BigInt,
    terms: Vec<(u64, BigInt, BigInt)>,
}

fn cleared_entry(entry: &PolyQ, pn: u64) -> ClearedEntry {
    let mut den = BigInt::one();
    let mut raw = Vec::new();
    for (e, c) in entry.terms() {
        let (a, b, d) = c.to_integer_coords();
        den = den.lcm(&d);
        raw.push((e as u64 % pn, a, b, d));
    }
    let terms = raw
        .into_iter()
        .map(|(e, a, b, d)| {
            let m = &den / &d;
            (e, a * &m, b * &m)
        })
        .collect();
    ClearedEntry { den, terms }
}

/// Literal root-of-unity averaging against one truncated logarithm matrix,
/// reusable across every coset of the same depth.
pub struct AveragingOracle {
    ctx: HeckeData,
    n: u32,
    pn: u64,
    entries: Vec<ClearedEntry>,
}

impl AveragingOracle {
    /// Prepare the depth-`n` sweep with the default work gate.
    pub fn new(ctx: &HeckeData, n: u32) -> Result<Self> {
        Self::with_gate(ctx, n, DEFAULT_ROOTS_GATE)
    }

    /// Prepare the depth-`n` sweep with an explicit cap on `p^n`.
    pub fn with_gate(ctx: &HeckeData, n: u32, gate: u64) -> Result<Self> {
        let pn = modulus(ctx.p(), n)?;
        if pn > gate {
            return Err(Error::OracleGateExceeded { pn, gate });
        }
        let l = log_truncation(ctx, n)?;
        let entries = l.entries().iter().map(|e| cleared_entry(e, pn)).collect();
        Ok(AveragingOracle {
            ctx: *ctx,
            n,
            pn,
            entries,
        })
    }

    /// `μ(b + p^n·Z_p)` by summing `ζ^{−b}·Log^{(n)}(ζ)` over all `p^n`-th
    /// roots of unity `ζ` and dividing by `p^n`.
    ///
    /// # Panics
    ///
    /// Panics if a reduced sum is not a scalar — that would contradict the
    /// averaging identity itself, so it is treated as an internal invariant
    /// violation rather than a recoverable error.
    pub fn value(&self, b: &BigInt) -> QuadMat2 {
        let bbar = residue(b, self.pn);
        let shift = (self.pn - bbar) % self.pn;
        let swept: Vec<QuadElem> = self
            .entries
            .iter()
            .map(|e| self.swept_entry(e, shift))
            .collect();
        let arr: [QuadElem; 4] = swept.try_into().expect("four matrix entries");
        QuadMat2::new(self.ctx.ring(), arr).expect("entries share the context ring")
    }

    /// Sum one shifted entry over all `p^n`-th roots of unity by brute
    /// force and reduce by the minimal polynomial of a primitive root.
    fn swept_entry(&self, entry: &ClearedEntry, shift: u64) -> QuadElem {
        let pn = self.pn;
        let size = pn as usize;
        let p = self.ctx.p() as usize;
        let mut acc: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::zero()); size];
        for j in 0..pn {
            for (e, a, b) in &entry.terms {
                let eb = (e + shift) % pn;
                let t = ((j as u128 * eb as u128) % pn as u128) as usize;
                acc[t].0 += a;
                acc[t].1 += b;
            }
        }
        // A primitive root ζ satisfies Σ_{i<p} ζ^{i·p^{n−1}} = 0, so the
        // top block of exponents folds down:
        // x^{s+(p−1)p^{n−1}} ≡ −Σ_{i<p−1} x^{s+i·p^{n−1}}.
        let step = pow_u64(self.ctx.p(), self.n - 1).expect("below the verified modulus") as usize;
        let top = step * (p - 1);
        for t in (top..size).rev() {
            if acc[t].0.is_zero() && acc[t].1.is_zero() {
                continue;
            }
            let (a, b) = std::mem::replace(&mut acc[t], (BigInt::zero(), BigInt::zero()));
            let s = t - top;
            for i in 0..(p - 1) {
                acc[s + i * step].0 -= &a;
                acc[s + i * step].1 -= &b;
            }
        }
        for (t, (a, b)) in acc.iter().enumerate().take(top).skip(1) {
            assert!(
                a.is_zero() && b.is_zero(),
                "root-of-unity sum failed to collapse to a scalar at {}, \
                 modulus {pn}: residual exponent {t}",
                self.ctx
            );
        }
        let scale = &entry.den * BigInt::from(pn);
        self.ctx.ring().elem(
            Rational::new(acc[0].0.clone(), scale.clone()),
            Rational::new(acc[0].1.clone(), scale),
        )
    }
}

/// Recover `μ(b + p^n·Z_p)` by literally summing `ζ^{−b}·Log^{(n)}(ζ)` over
/// all `p^n`-th roots of unity `ζ` and dividing by `p^n`, with the default
/// work gate of [`DEFAULT_ROOTS_GATE`].
pub fn roots_of_unity_sum(ctx: &HeckeData, b: &BigInt, n: u32) -> Result<QuadMat2> {
    roots_of_unity_sum_with_gate(ctx, b, n, DEFAULT_ROOTS_GATE)
}

/// [`roots_of_unity_sum`] with an explicit cap on `p^n`.
pub fn roots_of_unity_sum_with_gate(
    ctx: &HeckeData,
    b: &BigInt,
    n: u32,
    gate: u64,
) -> Result<QuadMat2> {
    Ok(AveragingOracle::with_gate(ctx, n, gate)?.value(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::mu_matrix;

    fn ctx(p: u32, ap: i64, eps: i8) -> HeckeData {
        HeckeData::new(p, ap, eps).unwrap()
    }

    fn big(b: i64) -> BigInt {
        BigInt::from(b)
    }

    #[test]
    fn coefficient_oracle_matches_digit_product() {
        for c in [ctx(3, 0, 1), ctx(3, 1, -1), ctx(2, 1, 1), ctx(5, 2, 1)] {
            let n_top = if c.p() == 5 { 2 } else { 3 };
            for n in 1..=n_top {
                let oracle = CoefficientOracle::new(&c, n).unwrap();
                let pn = pow_u64(c.p(), n).unwrap() as i64;
                for b in 0..pn {
                    assert_eq!(
                        oracle.value(&big(b)).unwrap(),
                        mu_matrix(&c, &big(b), n).unwrap(),
                        "{c} b={b} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn averaging_oracle_matches_digit_product() {
        for c in [ctx(3, 0, 1), ctx(3, 1, -1), ctx(2, 2, -1)] {
            for n in 1..=2 {
                let oracle = AveragingOracle::new(&c, n).unwrap();
                let pn = pow_u64(c.p(), n).unwrap() as i64;
                for b in 0..pn {
                    assert_eq!(
                        oracle.value(&big(b)),
                        mu_matrix(&c, &big(b), n).unwrap(),
                        "{c} b={b} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn averaging_needs_primitive_relation() {
        // The base-2 depth-1 case only collapses through the relation
        // ζ + 1 = 0 for the primitive square root of unity; folding
        // exponents alone leaves a linear term.  This pins the reduction
        // path that makes the sweep correct.
        let c = ctx(2, 1, 1);
        for b in 0..2 {
            assert_eq!(
                roots_of_unity_sum(&c, &big(b), 1).unwrap(),
                mu_matrix(&c, &big(b), 1).unwrap()
            );
        }
    }

    #[test]
    fn oracles_handle_negative_and_large_residues() {
        let c = ctx(3, 0, 1);
        assert_eq!(
            roots_of_unity_sum(&c, &big(-1), 2).unwrap(),
            roots_of_unity_sum(&c, &big(8), 2).unwrap()
        );
        assert_eq!(
            mu_oracle(&c, &big(100), 2).unwrap(),
            mu_oracle(&c, &big(1), 2).unwrap()
        );
    }

    #[test]
    fn gate_rejects_large_sweeps() {
        let c = ctx(3, 0, 1);
        // 3^6 = 729 exceeds the default gate; the call must fail fast.
        assert!(matches!(
            roots_of_unity_sum(&c, &big(0), 6),
            Err(Error::OracleGateExceeded {
                pn: 729,
                gate: DEFAULT_ROOTS_GATE
            })
        ));
        let d = ctx(2, 1, 1);
        assert!(matches!(
            roots_of_unity_sum_with_gate(&d, &big(0), 3, 4),
            Err(Error::OracleGateExceeded { pn: 8, gate: 4 })
        ));
        assert!(roots_of_unity_sum_with_gate(&d, &big(0), 3, 8).is_ok());
    }
}
