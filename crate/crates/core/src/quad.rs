//! The quadratic coefficient ring `Q(α)` with `α² = a_p·α − ε·p`.
//!
//! Every matrix entry in this crate lives in one of these rings.  An element
//! is stored on the basis `{1, α}` with exact rational coordinates, tagged by
//! its ring so that elements from different Hecke contexts cannot be mixed
//! silently: the checked operations report the clash, the operator impls
//! panic with the same message.
//!
//! `β`, the other root of `X² − a_p·X + ε·p`, is always `a_p − α`; no
//! canonical ordering of the two roots is chosen beyond that.  Conjugation
//! swaps them, and downstream symmetry (matrix column swaps) keeps track of
//! what would change under the opposite labeling.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, vp, ExtValuation, Rational};

/// A quadratic ring context: the prime, the linear coefficient `a_p`, and the
/// sign unit `ε` of the defining polynomial `X² − a_p·X + ε·p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadRing {
    pub p: u32,
    pub ap: i64,
    pub eps: i8,
}

impl QuadRing {
    /// Builds a ring context, validating that `p` is prime and `ε = ±1`.
    pub fn new(p: u32, ap: i64, eps: i8) -> Result<Self> {
        if !crate::rational::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::InvalidEps(i64::from(eps)));
        }
        Ok(QuadRing { p, ap, eps })
    }

    /// `p | a_p`: the ramified/supersingular situation.
    pub fn is_supersingular(&self) -> bool {
        self.ap.rem_euclid(i64::from(self.p)) == 0
    }

    /// The additive identity.
    pub fn zero(&self) -> QuadElem {
        self.elem(rat(0), rat(0))
    }

    /// The multiplicative identity.
    pub fn one(&self) -> QuadElem {
        self.elem(rat(1), rat(0))
    }

    /// The distinguished root `α`.
    pub fn alpha(&self) -> QuadElem {
        self.elem(rat(0), rat(1))
    }

    /// The conjugate root `β = a_p − α`.
    pub fn beta(&self) -> QuadElem {
        self.elem(rat(self.ap), rat(-1))
    }

    /// Embeds an integer.
    pub fn int(&self, n: i64) -> QuadElem {
        self.elem(rat(n), rat(0))
    }

    /// Embeds a rational.
    pub fn from_rational(&self, r: Rational) -> QuadElem {
        self.elem(r, rat(0))
    }

    /// Builds an element from coordinates on the basis `{1, α}`.
    pub fn elem(&self, c0: Rational, c1: Rational) -> QuadElem {
        QuadElem { ring: *self, c0, c1 }
    }

    /// Reads an element back from its JSON form `{"c0": "...", "c1": "..."}`.
    /// The ring is context, not payload, so deserialization is ring-directed.
    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<QuadElem> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse(format!("expected a c0/c1 object, got {v}")))?;
        let field = |k: &str| -> Result<Rational> {
            let s = obj
                .get(k)
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Parse(format!("missing string field {k:?} in {v}")))?;
            parse_rational(s)
        };
        Ok(self.elem(field("c0")?, field("c1")?))
    }

    pub(crate) fn mismatch(&self, other: &QuadRing) -> Error {
        Error::MixedRings(self.p, self.ap, self.eps, other.p, other.ap, other.eps)
    }
}

/// An element `c0 + c1·α` of a [`QuadRing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElem {
    ring: QuadRing,
    c0: Rational,
    c1: Rational,
}

impl QuadElem {
    pub fn ring(&self) -> &QuadRing {
        &self.ring
    }

    pub fn c0(&self) -> &Rational {
        &self.c0
    }

    pub fn c1(&self) -> &Rational {
        &self.c1
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    /// True when the element lies in the prime field `Q ⊂ Q(α)`.
    pub fn is_rational(&self) -> bool {
        self.c1.is_zero()
    }

    fn same_ring(&self, other: &QuadElem) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(self.ring.mismatch(&other.ring))
        }
    }

    /// Sum, rejecting mixed rings.
    pub fn checked_add(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_ring(other)?;
        Ok(self
            .ring
            .elem(&self.c0 + &other.c0, &self.c1 + &other.c1))
    }

    /// Difference, rejecting mixed rings.
    pub fn checked_sub(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_ring(other)?;
        Ok(self
            .ring
            .elem(&self.c0 - &other.c0, &self.c1 - &other.c1))
    }

    /// Product, rejecting mixed rings.  Multiplication reduces `α²` by the
    /// defining relation `α² = a_p·α − ε·p`.
    pub fn checked_mul(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_ring(other)?;
        let ap = rat(self.ring.ap);
        let epsp = rat(i64::from(self.ring.eps) * i64::from(self.ring.p));
        let cross = &self.c1 * &other.c1;
        let c0 = &self.c0 * &other.c0 - &cross * &epsp;
        let c1 = &self.c0 * &other.c1 + &self.c1 * &other.c0 + &cross * &ap;
        Ok(self.ring.elem(c0, c1))
    }

    /// Scales by a rational.
    pub fn scale(&self, r: &Rational) -> QuadElem {
        self.ring.elem(&self.c0 * r, &self.c1 * r)
    }

    /// The ring conjugate, i.e. the image under `α ↦ β = a_p − α`.
    pub fn conj(&self) -> QuadElem {
        let c0 = &self.c0 + rat(self.ring.ap) * &self.c1;
        self.ring.elem(c0, -self.c1.clone())
    }

    /// `x · conj(x)`, landing in `Q`: `c0² + a_p·c0·c1 + ε·p·c1²`.
    pub fn norm(&self) -> Rational {
        let ap = rat(self.ring.ap);
        let epsp = rat(i64::from(self.ring.eps) * i64::from(self.ring.p));
        &self.c0 * &self.c0 + ap * &self.c0 * &self.c1 + epsp * &self.c1 * &self.c1
    }

    /// `x + conj(x)`, landing in `Q`: `2·c0 + a_p·c1`.
    pub fn trace(&self) -> Rational {
        rat(2) * &self.c0 + rat(self.ring.ap) * &self.c1
    }

    /// Multiplicative inverse via `conj(x)/norm(x)`.  Elements of norm zero
    /// (zero divisors of a split ring, or zero itself) are rejected.
    pub fn inverse(&self) -> Result<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    /// Exact division, rejecting norm-zero divisors.
    pub fn checked_div(&self, other: &QuadElem) -> Result<QuadElem> {
        self.checked_mul(&other.inverse()?)
    }

    /// `x^k` by binary powering.
    pub fn pow(&self, k: u32) -> QuadElem {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base).expect("same ring by construction");
            }
            base = base.checked_mul(&base).expect("same ring by construction");
            k >>= 1;
        }
        acc
    }

    /// The `p`-adic valuation in a supersingular context, where the unique
    /// extension of `v_p` to `Q(α)` is `v(x) = v_p(norm x)/2`; half-integers
    /// are genuine values here, e.g. `v(α) = 1/2` when `a_p = 0`.
    ///
    /// Ordinary contexts are rejected: there the two embeddings of `α`
    /// disagree, and the meaningful question is answered by the Hensel-based
    /// valuation instead.
    pub fn quad_vp(&self) -> Result<ExtValuation> {
        if !self.ring.is_supersingular() {
            return Err(Error::OrdinaryContext {
                op: "quad_vp",
                p: self.ring.p,
                ap: self.ring.ap,
            });
        }
        Ok(vp(&self.norm(), self.ring.p)?.half())
    }

    /// Clears denominators: returns `(a, b, d)` with `x = (a + b·α)/d`,
    /// `d > 0` minimal.
    pub fn to_integer_coords(&self) -> (BigInt, BigInt, BigInt) {
        let d = num_integer::Integer::lcm(self.c0.denom(), self.c1.denom());
        let a = (&self.c0 * Rational::from_integer(d.clone())).to_integer();
        let b = (&self.c1 * Rational::from_integer(d.clone())).to_integer();
        (a, b, d)
    }
}

impl Serialize for QuadElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadElem", 2)?;
        st.serialize_field("c0", &self.c0.to_string())?;
        st.serialize_field("c1", &self.c1.to_string())?;
        st.end()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1.is_zero() {
            return write!(f, "{}", self.c0);
        }
        let alpha_part = |f: &mut fmt::Formatter<'_>, c: &Rational| -> fmt::Result {
            if c.is_one() {
                write!(f, "α")
            } else {
                write!(f, "{c}·α")
            }
        };
        if self.c0.is_zero() {
            if self.c1.is_negative() {
                write!(f, "-")?;
            }
            return alpha_part(f, &self.c1.abs());
        }
        write!(f, "{}", self.c0)?;
        write!(f, "{}", if self.c1.is_negative() { " - " } else { " + " })?;
        alpha_part(f, &self.c1.abs())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:expr) => {
        impl $trait<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, other: &QuadElem) -> QuadElem {
                self.$checked(other)
                    .unwrap_or_else(|e| panic!(concat!($what, ": {}"), e))
            }
        }
        impl $trait<QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, other: QuadElem) -> QuadElem {
                self.$method(&other)
            }
        }
        impl $trait<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, other: &QuadElem) -> QuadElem {
                (&self).$method(other)
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, other: QuadElem) -> QuadElem {
                (&self).$method(&other)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, "quadratic addition");
forward_binop!(Sub, sub, checked_sub, "quadratic subtraction");
forward_binop!(Mul, mul, checked_mul, "quadratic multiplication");

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        self.ring.elem(-self.c0.clone(), -self.c1.clone())
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}
