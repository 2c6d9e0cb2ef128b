//! 2×2 matrices over a quadratic ring.
//!
//! Distribution values, companion matrices, and the right normalization
//! factors are all `QuadMat2`s.  Storage is row-major `[a, b, c, d]` for
//! `[[a, b], [c, d]]`, and the JSON form is the row-major nested array the
//! rest of the tooling expects.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quad::{QuadElem, QuadRing};
use crate::rational::{ExtValuation, Rational};

/// A 2×2 matrix with entries in one [`QuadRing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadMat2 {
    ring: QuadRing,
    e: [QuadElem; 4],
}

impl QuadMat2 {
    /// Builds a matrix from row-major entries, all of which must share a ring.
    pub fn new(ring: QuadRing, e: [QuadElem; 4]) -> Result<Self> {
        for x in &e {
            if *x.ring() != ring {
                return Err(Error::MixedRings(
                    ring.p,
                    ring.ap,
                    ring.eps,
                    x.ring().p,
                    x.ring().ap,
                    x.ring().eps,
                ));
            }
        }
        Ok(QuadMat2 { ring, e })
    }

    /// Builds from integer entries, a common case for the digit matrices.
    pub fn from_ints(ring: QuadRing, a: i64, b: i64, c: i64, d: i64) -> Self {
        QuadMat2 {
            ring,
            e: [ring.int(a), ring.int(b), ring.int(c), ring.int(d)],
        }
    }

    pub fn zero(ring: QuadRing) -> Self {
        Self::from_ints(ring, 0, 0, 0, 0)
    }

    pub fn identity(ring: QuadRing) -> Self {
        Self::from_ints(ring, 1, 0, 0, 1)
    }

    pub fn ring(&self) -> &QuadRing {
        &self.ring
    }

    /// Entry at row `i`, column `j` (both in `{0, 1}`).
    pub fn entry(&self, i: usize, j: usize) -> &QuadElem {
        assert!(i < 2 && j < 2, "index out of range for a 2x2 matrix");
        &self.e[2 * i + j]
    }

    /// Row-major view of the four entries.
    pub fn entries(&self) -> &[QuadElem; 4] {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(QuadElem::is_zero)
    }

    fn same_ring(&self, other: &QuadMat2) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::MixedRings(
                self.ring.p,
                self.ring.ap,
                self.ring.eps,
                other.ring.p,
                other.ring.ap,
                other.ring.eps,
            ))
        }
    }

    pub fn checked_add(&self, other: &QuadMat2) -> Result<QuadMat2> {
        self.same_ring(other)?;
        let mut e = self.e.clone();
        for (x, y) in e.iter_mut().zip(&other.e) {
            *x = x.checked_add(y)?;
        }
        Ok(QuadMat2 { ring: self.ring, e })
    }

    pub fn checked_sub(&self, other: &QuadMat2) -> Result<QuadMat2> {
        self.same_ring(other)?;
        let mut e = self.e.clone();
        for (x, y) in e.iter_mut().zip(&other.e) {
            *x = x.checked_sub(y)?;
        }
        Ok(QuadMat2 { ring: self.ring, e })
    }

    pub fn checked_mul(&self, other: &QuadMat2) -> Result<QuadMat2> {
        self.same_ring(other)?;
        let m = |i: usize, j: usize| -> Result<QuadElem> {
            self.entry(i, 0)
                .checked_mul(other.entry(0, j))?
                .checked_add(&self.entry(i, 1).checked_mul(other.entry(1, j))?)
        };
        Ok(QuadMat2 {
            ring: self.ring,
            e: [m(0, 0)?, m(0, 1)?, m(1, 0)?, m(1, 1)?],
        })
    }

    /// Scales every entry by a rational.
    pub fn scale(&self, r: &Rational) -> QuadMat2 {
        let e = self.e.clone().map(|x| x.scale(r));
        QuadMat2 { ring: self.ring, e }
    }

    /// Scales every entry by a ring element.
    pub fn scale_elem(&self, x: &QuadElem) -> Result<QuadMat2> {
        let mut e = self.e.clone();
        for entry in e.iter_mut() {
            *entry = entry.checked_mul(x)?;
        }
        Ok(QuadMat2 { ring: self.ring, e })
    }

    pub fn det(&self) -> QuadElem {
        &(self.entry(0, 0) * self.entry(1, 1)) - &(self.entry(0, 1) * self.entry(1, 0))
    }

    pub fn trace(&self) -> QuadElem {
        self.entry(0, 0) + self.entry(1, 1)
    }

    /// Applies the ring conjugation `α ↦ β` to every entry.
    pub fn conj_entrywise(&self) -> QuadMat2 {
        let e = self.e.clone().map(|x| x.conj());
        QuadMat2 { ring: self.ring, e }
    }

    /// Right-multiplication by the column swap `[[0,1],[1,0]]`.
    pub fn swap_columns(&self) -> QuadMat2 {
        QuadMat2 {
            ring: self.ring,
            e: [
                self.e[1].clone(),
                self.e[0].clone(),
                self.e[3].clone(),
                self.e[2].clone(),
            ],
        }
    }

    /// Inverse by the adjugate formula; requires `det` of nonzero norm.
    pub fn inverse(&self) -> Result<QuadMat2> {
        let dinv = self.det().inverse()?;
        let adj = QuadMat2 {
            ring: self.ring,
            e: [
                self.e[3].clone(),
                -&self.e[1],
                -&self.e[2],
                self.e[0].clone(),
            ],
        };
        adj.scale_elem(&dinv)
    }

    /// `M^k` for any integer `k`; negative powers go through the inverse.
    pub fn pow(&self, k: i64) -> Result<QuadMat2> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = QuadMat2::identity(self.ring);
        let mut b = base;
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.checked_mul(&b)?;
            }
            b = b.checked_mul(&b)?;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Minimum of `quad_vp` over the entries (supersingular contexts only).
    pub fn min_quad_vp(&self) -> Result<ExtValuation> {
        let mut best = ExtValuation::Infinity;
        for x in &self.e {
            best = best.min(x.quad_vp()?);
        }
        Ok(best)
    }

    /// Reads a matrix from its JSON form, directed by the ring.
    pub fn from_json(ring: QuadRing, v: &serde_json::Value) -> Result<QuadMat2> {
        let rows = v
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::Parse(format!("expected a 2-row matrix, got {v}")))?;
        let mut e = Vec::with_capacity(4);
        for row in rows {
            let cols = row
                .as_array()
                .filter(|c| c.len() == 2)
                .ok_or_else(|| Error::Parse(format!("expected a 2-column row, got {row}")))?;
            for cell in cols {
                e.push(ring.elem_from_json(cell)?);
            }
        }
        let e: [QuadElem; 4] = e.try_into().expect("exactly four entries");
        Ok(QuadMat2 { ring, e })
    }
}

impl Serialize for QuadMat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [&self.e[0], &self.e[1]],
            [&self.e[2], &self.e[3]],
        ];
        rows.serialize(s)
    }
}

impl fmt::Display for QuadMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.e.iter().map(|x| x.to_string()).collect();
        let w0 = s[0].len().max(s[2].len());
        let w1 = s[1].len().max(s[3].len());
        writeln!(f, "[ {:>w0$}  {:>w1$} ]", s[0], s[1], w0 = w0, w1 = w1)?;
        write!(f, "[ {:>w0$}  {:>w1$} ]", s[2], s[3], w0 = w0, w1 = w1)
    }
}

macro_rules! forward_mat_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:expr) => {
        impl $trait<&QuadMat2> for &QuadMat2 {
            type Output = QuadMat2;
            fn $method(self, other: &QuadMat2) -> QuadMat2 {
                self.$checked(other)
                    .unwrap_or_else(|e| panic!(concat!($what, ": {}"), e))
            }
        }
        impl $trait<QuadMat2> for &QuadMat2 {
            type Output = QuadMat2;
            fn $method(self, other: QuadMat2) -> QuadMat2 {
                self.$method(&other)
            }
        }
        impl $trait<&QuadMat2> for QuadMat2 {
            type Output = QuadMat2;
            fn $method(self, other: &QuadMat2) -> QuadMat2 {
                (&self).$method(other)
            }
        }
        impl $trait<QuadMat2> for QuadMat2 {
            type Output = QuadMat2;
            fn $method(self, other: QuadMat2) -> QuadMat2 {
                (&self).$method(&other)
            }
        }
    };
}

forward_mat_binop!(Add, add, checked_add, "matrix addition");
forward_mat_binop!(Sub, sub, checked_sub, "matrix subtraction");
forward_mat_binop!(Mul, mul, checked_mul, "matrix multiplication");

impl Neg for &QuadMat2 {
    type Output = QuadMat2;
    fn neg(self) -> QuadMat2 {
        let e = self.e.clone().map(|x| -x);
        QuadMat2 { ring: self.ring, e }
    }
}

impl Neg for QuadMat2 {
    type Output = QuadMat2;
    fn neg(self) -> QuadMat2 {
        -&self
    }
}
