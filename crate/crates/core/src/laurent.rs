//! Laurent polynomials over the quadratic ring and the root-of-unity
//! averaging shortcut.
//!
//! The key fact: if every exponent of a Laurent polynomial `f` lies strictly
//! between `−p^n` and `p^n`, then summing `f` over all `p^n`-th roots of
//! unity picks out `p^n` times the constant coefficient — all other
//! exponent columns cancel.  [`constant_term_sum`] applies this; pairing it
//! with a shift by `−b` turns coefficient extraction into an averaging
//! formula.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::QuadMat2;
use crate::poly::{PolyMat2, PolyQ};
use crate::quad::{QuadElem, QuadRing};
use crate::rational::{is_prime, pow_u64, Rational};

/// A Laurent polynomial with coefficients in Q(α): finitely many terms
/// `c_e·x^e` with `e ∈ Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ring: QuadRing,
    terms: BTreeMap<i64, QuadElem>,
}

impl LaurentPoly {
    /// The zero Laurent polynomial.
    pub fn zero(ring: QuadRing) -> Self {
        LaurentPoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(exponent, coefficient)` pairs; duplicate exponents
    /// accumulate and zero coefficients drop out.
    pub fn from_terms(
        ring: QuadRing,
        terms: impl IntoIterator<Item = (i64, QuadElem)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<i64, QuadElem> = BTreeMap::new();
        for (e, c) in terms {
            if *c.ring() != ring {
                return Err(ring.mismatch(c.ring()));
            }
            let next = match map.get(&e) {
                Some(prev) => prev.checked_add(&c)?,
                None => c,
            };
            if next.is_zero() {
                map.remove(&e);
            } else {
                map.insert(e, next);
            }
        }
        Ok(LaurentPoly { ring, terms: map })
    }

    /// Embed an ordinary polynomial (all exponents ≥ 0).
    pub fn from_poly(p: &PolyQ) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in p.terms() {
            terms.insert(e as i64, c.clone());
        }
        LaurentPoly {
            ring: *p.ring(),
            terms,
        }
    }

    /// The coefficient ring.
    pub fn ring(&self) -> QuadRing {
        self.ring
    }

    /// Multiply by `x^k` (any sign of `k`).
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    /// The coefficient of `x^e`.
    pub fn coeff(&self, e: i64) -> QuadElem {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// The coefficient of `x^0`.
    pub fn constant_coeff(&self) -> QuadElem {
        self.coeff(0)
    }

    /// Smallest and largest exponent carrying a nonzero term, if any.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        let lo = *self.terms.keys().next()?;
        let hi = *self.terms.keys().next_back()?;
        Some((lo, hi))
    }

    /// Whether all terms vanish.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The nonzero terms, in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &QuadElem)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    /// Termwise sum.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(self.ring.mismatch(&other.ring));
        }
        let mut terms = self.terms.clone();
        for (&e, c) in &other.terms {
            let next = match terms.get(&e) {
                Some(prev) => prev.checked_add(c)?,
                None => c.clone(),
            };
            if next.is_zero() {
                terms.remove(&e);
            } else {
                terms.insert(e, next);
            }
        }
        Ok(LaurentPoly {
            ring: self.ring,
            terms,
        })
    }

    /// Scale every coefficient by a rational.
    pub fn scale(&self, r: &Rational) -> Self {
        use num_traits::Zero;
        if r.is_zero() {
            return LaurentPoly::zero(self.ring);
        }
        LaurentPoly {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, c.scale(r)))
                .collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})·x")?,
                _ => write!(f, "({c})·x^{e}")?,
            }
        }
        Ok(())
    }
}

/// A 2×2 matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMat2 {
    ring: QuadRing,
    e: [LaurentPoly; 4],
}

impl LaurentMat2 {
    /// Embed a polynomial matrix.
    pub fn from_poly_mat(m: &PolyMat2) -> Self {
        let [a, b, c, d] = m.entries();
        LaurentMat2 {
            ring: *m.ring(),
            e: [
                LaurentPoly::from_poly(a),
                LaurentPoly::from_poly(b),
                LaurentPoly::from_poly(c),
                LaurentPoly::from_poly(d),
            ],
        }
    }

    /// The coefficient ring.
    pub fn ring(&self) -> QuadRing {
        self.ring
    }

    /// The `(i, j)` entry.
    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.e[2 * i + j]
    }

    /// Multiply every entry by `x^k`.
    pub fn shift_all(&self, k: i64) -> Self {
        LaurentMat2 {
            ring: self.ring,
            e: [
                self.e[0].shift(k),
                self.e[1].shift(k),
                self.e[2].shift(k),
                self.e[3].shift(k),
            ],
        }
    }

    /// The matrix of constant coefficients.
    pub fn constant_term_matrix(&self) -> QuadMat2 {
        QuadMat2::new(
            self.ring,
            [
                self.e[0].constant_coeff(),
                self.e[1].constant_coeff(),
                self.e[2].constant_coeff(),
                self.e[3].constant_coeff(),
            ],
        )
        .expect("entries share the matrix ring")
    }

    /// The extreme exponents over all four entries, if any entry is nonzero.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        self.e
            .iter()
            .filter_map(LaurentPoly::exponent_range)
            .reduce(|(lo, hi), (l, h)| (lo.min(l), hi.max(h)))
    }
}

/// Sum `f` over all `p^n`-th roots of unity, assuming every exponent of `f`
/// lies strictly inside `(−p^n, p^n)`; the result is `p^n · c_0` where `c_0`
/// is the constant coefficient.  An exponent on or outside the window
/// boundary is an error — the cancellation argument needs the strict bound.
pub fn constant_term_sum(f: &LaurentPoly, p: u32, n: u32) -> Result<QuadElem> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    let bound = pow_u64(p, n)
        .filter(|&pn| pn <= i64::MAX as u64)
        .ok_or(Error::DegreeOverflow {
            p,
            n,
            bound: i64::MAX as u64,
        })?;
    for (e, _) in f.terms() {
        if e.unsigned_abs() >= bound {
            return Err(Error::ExponentOutOfWindow {
                exponent: e,
                bound,
            });
        }
    }
    Ok(f.constant_coeff().scale(&Rational::from_integer(bound.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::HeckeData;
    use crate::logmatrix::log_truncation;
    use crate::rational::rat;

    fn ring() -> QuadRing {
        QuadRing::new(3, 0, 1).unwrap()
    }

    fn from_pairs(r: QuadRing, pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(r, pairs.iter().map(|&(e, c)| (e, r.int(c)))).unwrap()
    }

    #[test]
    fn term_constructor_accumulates_and_cancels() {
        let r = ring();
        let f = LaurentPoly::from_terms(
            r,
            [(2, r.int(1)), (-1, r.int(4)), (2, r.int(-1)), (0, r.int(9))],
        )
        .unwrap();
        assert!(f.coeff(2).is_zero());
        assert_eq!(f.exponent_range(), Some((-1, 0)));
        let other = QuadRing::new(3, 0, -1).unwrap();
        assert!(LaurentPoly::from_terms(r, [(0, other.int(1))]).is_err());
    }

    #[test]
    fn shift_and_coeff() {
        let r = ring();
        let f = from_pairs(r, &[(0, 7), (2, 1)]);
        let g = f.shift(-3);
        assert_eq!(g.coeff(-3), r.int(7));
        assert_eq!(g.coeff(-1), r.int(1));
        assert!(g.coeff(0).is_zero());
        assert_eq!(g.exponent_range(), Some((-3, -1)));
        assert_eq!(g.shift(3), f);
    }

    #[test]
    fn addition_cancels_terms() {
        let r = ring();
        let f = from_pairs(r, &[(-1, 2), (0, 7)]);
        let g = from_pairs(r, &[(-1, -2), (5, 3)]);
        let h = f.checked_add(&g).unwrap();
        assert!(h.coeff(-1).is_zero());
        assert_eq!(h.exponent_range(), Some((0, 5)));
        assert_eq!(h.coeff(5), r.int(3));
    }

    #[test]
    fn window_sum_frozen_example() {
        // f = 2·x^{−1} + 7 + x², p = 3, n = 1: all exponents in (−3, 3),
        // so the sum over the cube roots of unity is 3·7 = 21.
        let r = ring();
        let f = from_pairs(r, &[(-1, 2), (0, 7), (2, 1)]);
        assert_eq!(constant_term_sum(&f, 3, 1).unwrap(), r.int(21));
    }

    #[test]
    fn window_violations_rejected() {
        let r = ring();
        let f = from_pairs(r, &[(0, 7), (3, 1)]);
        assert!(matches!(
            constant_term_sum(&f, 3, 1),
            Err(Error::ExponentOutOfWindow {
                exponent: 3,
                bound: 3
            })
        ));
        let g = from_pairs(r, &[(-9, 1), (0, 7)]);
        assert!(matches!(
            constant_term_sum(&g, 3, 2),
            Err(Error::ExponentOutOfWindow {
                exponent: -9,
                bound: 9
            })
        ));
        assert!(matches!(
            constant_term_sum(&g, 4, 1),
            Err(Error::NonPrime(4))
        ));
    }

    #[test]
    fn window_sum_scales_constant_term() {
        let r = ring();
        let f = from_pairs(r, &[(-4, 5), (0, -2), (7, 1)]);
        // |e| < 9 for all terms
        assert_eq!(constant_term_sum(&f, 3, 2).unwrap(), r.int(-18));
        // the zero polynomial sums to zero at any depth
        assert!(constant_term_sum(&LaurentPoly::zero(r), 5, 3)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn matrix_embedding_and_shift() {
        let ctx = HeckeData::new(3, 0, 1).unwrap();
        let lm = log_truncation(&ctx, 2).unwrap();
        let lau = LaurentMat2::from_poly_mat(&lm);
        // constant term of the embedding matches the coefficient matrix
        assert_eq!(lau.constant_term_matrix(), lm.coeff_matrix(0));
        // shifting by −b moves the x^b column into the constant slot
        let b = 5i64;
        let shifted = lau.shift_all(-b);
        assert_eq!(
            shifted.constant_term_matrix(),
            lm.coeff_matrix(b as usize)
        );
        let (lo, hi) = shifted.exponent_range().unwrap();
        assert_eq!(lo, -b);
        assert!(hi <= 9 - 1 - b);
    }

    #[test]
    fn scaling() {
        let r = ring();
        let f = from_pairs(r, &[(-1, 2), (3, 4)]);
        let g = f.scale(&rat(0));
        assert!(g.is_zero());
        let h = f.scale(&crate::rational::ratio(1, 2));
        assert_eq!(h.coeff(-1), r.int(1));
        assert_eq!(h.coeff(3), r.int(2));
    }
}
