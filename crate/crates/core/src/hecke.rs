//! Hecke eigendata contexts and the structure attached to them.
//!
//! A [`HeckeData`] bundles the prime `p`, the eigenvalue `a_p`, the sign
//! unit `ε`, and a working depth bound `n_max`.  From it we derive the
//! companion matrix `C` of `X² − a_p·X + ε·p`, the normalization matrices
//! `R_n`, and — in the ordinary case — the Hensel lift of the unit root of
//! that polynomial, which powers an exact `p`-adic valuation on the
//! quadratic ring.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::QuadMat2;
use crate::quad::{QuadElem, QuadRing};
use crate::rational::{int_vp, perfect_sqrt, vp, ExtValuation, Rational};

/// Default depth bound; deep enough for every verification grid in the crate
/// while guarding against accidental huge polynomial degrees downstream.
pub const DEFAULT_N_MAX: u32 = 12;

/// Ordinary (`p ∤ a_p`) versus supersingular (`p | a_p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Ordinary,
    Supersingular,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Ordinary => write!(f, "ordinary"),
            Classification::Supersingular => write!(f, "supersingular"),
        }
    }
}

/// The eigendata context: `(p, a_p, ε)` plus the depth bound `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeckeData {
    ring: QuadRing,
    n_max: u32,
}

impl HeckeData {
    /// Builds a context with the default depth bound.
    pub fn new(p: u32, ap: i64, eps: i8) -> Result<Self> {
        Self::with_n_max(p, ap, eps, DEFAULT_N_MAX)
    }

    /// Builds a context with an explicit depth bound `n_max ≥ 1`.
    pub fn with_n_max(p: u32, ap: i64, eps: i8, n_max: u32) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::DepthOutOfRange {
                n: n_max,
                min: 1,
                max: u32::MAX,
            });
        }
        Ok(HeckeData {
            ring: QuadRing::new(p, ap, eps)?,
            n_max,
        })
    }

    pub fn p(&self) -> u32 {
        self.ring.p
    }

    pub fn ap(&self) -> i64 {
        self.ring.ap
    }

    pub fn eps(&self) -> i8 {
        self.ring.eps
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// The coefficient ring `Q(α)`, `α² = a_p·α − ε·p`.
    pub fn ring(&self) -> QuadRing {
        self.ring
    }

    pub fn classify(&self) -> Classification {
        if self.ring.is_supersingular() {
            Classification::Supersingular
        } else {
            Classification::Ordinary
        }
    }

    /// Companion matrix `C = [[a_p, 1], [−ε·p, 0]]` of the defining
    /// polynomial; `det C = ε·p`.
    pub fn companion(&self) -> QuadMat2 {
        QuadMat2::from_ints(
            self.ring,
            self.ring.ap,
            1,
            -i64::from(self.ring.eps) * i64::from(self.ring.p),
            0,
        )
    }

    /// The inverse power of `C` used by `root_matrix` at depth `n`:
    /// `n + 2` for odd `p`, `n + 3` for `p = 2`.
    pub fn root_matrix_exponent(&self, n: u32) -> u32 {
        if self.ring.p == 2 {
            n + 3
        } else {
            n + 2
        }
    }

    /// The right normalization matrix
    /// `R_n = C^{−(n+2)} · [[−1, −1], [β, α]]`
    /// (with exponent `n + 3` when `p = 2`).
    ///
    /// Expanding the inverse powers on the eigenbasis of `C` gives the
    /// closed form `ε^e · p^{−e} · [[−β^e, −α^e], [β^{e+1}, α^{e+1}]]` with
    /// `e` the exponent above; the defining product form is what every
    /// identity in this crate (recursion in `n`, evaluation of the
    /// logarithm truncations) is stated against, so it is the one computed.
    pub fn root_matrix(&self, n: u32) -> QuadMat2 {
        let e = self.root_matrix_exponent(n);
        let r = self.ring;
        let m0 = QuadMat2::new(r, [r.int(-1), r.int(-1), r.beta(), r.alpha()])
            .expect("entries share the context ring");
        let c_pow = self
            .companion()
            .pow(-i64::from(e))
            .expect("companion matrix has unit determinant ε·p");
        c_pow
            .checked_mul(&m0)
            .expect("matrices share the context ring")
    }

    /// Hensel lift of the unit root of `X² − a_p·X + ε·p` to precision
    /// `p^precision`, starting from `α ≡ a_p (mod p)`.
    ///
    /// Only ordinary contexts have a unit root; the returned residue `r`
    /// satisfies `r² − a_p·r + ε·p ≡ 0 (mod p^precision)` and
    /// `r ≡ a_p (mod p)`.
    pub fn hensel_unit_root(&self, precision: u32) -> Result<BigUint> {
        if self.ring.is_supersingular() {
            return Err(Error::SupersingularContext {
                op: "hensel_unit_root",
                p: self.ring.p,
                ap: self.ring.ap,
            });
        }
        if precision < 1 {
            return Err(Error::DepthOutOfRange {
                n: precision,
                min: 1,
                max: u32::MAX,
            });
        }
        let p = BigInt::from(self.ring.p);
        let ap = BigInt::from(self.ring.ap);
        let epsp = BigInt::from(i64::from(self.ring.eps) * i64::from(self.ring.p));
        let f = |x: &BigInt| x * x - &ap * x + &epsp;

        let mut x = ap.mod_floor(&p);
        let mut pk = p.clone();
        for _ in 1..precision {
            // x is a root mod p^k; one linear correction makes it a root
            // mod p^{k+1}.  f'(x) ≡ a_p (mod p) stays invertible throughout.
            let q = f(&x) / &pk;
            let fprime = (BigInt::from(2) * &x - &ap).mod_floor(&p);
            let fprime = fprime.to_u64().expect("residue mod p fits in u64");
            let inv = BigInt::from(inv_mod_p(fprime, u64::from(self.ring.p)));
            let t = (-(q * inv)).mod_floor(&p);
            x += t * &pk;
            pk *= &p;
        }
        Ok(x.to_biguint().expect("canonical residues are nonnegative"))
    }

    /// Exact `p`-adic valuation of `x = c0 + c1·α` in an ordinary context,
    /// under the embedding sending `α` to the unit root.
    ///
    /// When the defining polynomial splits over `Q` the valuation is
    /// computed exactly (zero included).  Otherwise the element is paired
    /// against the Hensel lift at the requested precision; if the residue
    /// cannot be separated from zero the recoverable
    /// [`Error::NeedsMorePrecision`] asks the caller to retry higher, which
    /// is what [`HeckeData::hensel_vp_auto`] does.
    pub fn hensel_vp(&self, x: &QuadElem, precision: u32) -> Result<ExtValuation> {
        if self.ring.is_supersingular() {
            return Err(Error::SupersingularContext {
                op: "hensel_vp",
                p: self.ring.p,
                ap: self.ring.ap,
            });
        }
        if x.ring() != &self.ring {
            return Err(Error::MixedRings(
                self.ring.p,
                self.ring.ap,
                self.ring.eps,
                x.ring().p,
                x.ring().ap,
                x.ring().eps,
            ));
        }
        if x.is_zero() {
            return Ok(ExtValuation::Infinity);
        }
        if x.is_rational() {
            return vp(x.c0(), self.ring.p);
        }
        if let Some(u) = self.rational_unit_root() {
            // Split case: α embeds as a rational integer, exactly.
            let value = x.c0() + x.c1() * Rational::from_integer(u);
            return vp(&value, self.ring.p);
        }

        let (a, b, d) = x.to_integer_coords();
        let r = BigInt::from(self.hensel_unit_root(precision)?);
        let pn = BigInt::from(self.ring.p).pow(precision);
        let w = (a + b * r).mod_floor(&pn);
        if w.is_zero() {
            return Err(Error::NeedsMorePrecision { precision });
        }
        let v = int_vp(&w, self.ring.p) as i64 - int_vp(&d, self.ring.p) as i64;
        Ok(ExtValuation::finite_int(v))
    }

    /// [`HeckeData::hensel_vp`] with automatic precision escalation
    /// (doubling from 16 up to 1024).
    pub fn hensel_vp_auto(&self, x: &QuadElem) -> Result<ExtValuation> {
        let mut precision = 16;
        loop {
            match self.hensel_vp(x, precision) {
                Err(Error::NeedsMorePrecision { .. }) if precision < 1024 => {
                    precision *= 2;
                }
                other => return other,
            }
        }
    }

    /// The unit root as an exact rational integer, when the defining
    /// polynomial splits over `Q`; `None` in the irreducible case.
    fn rational_unit_root(&self) -> Option<BigInt> {
        let ap = BigInt::from(self.ring.ap);
        let disc = &ap * &ap - BigInt::from(4i64 * i64::from(self.ring.eps) * i64::from(self.ring.p));
        let s = perfect_sqrt(&disc)?;
        let p = BigInt::from(self.ring.p);
        let two = BigInt::from(2);
        // The two roots multiply to ε·p, so exactly one is a p-adic unit.
        for root in [(&ap + &s) / &two, (&ap - &s) / &two] {
            if !root.mod_floor(&p).is_zero() {
                return Some(root);
            }
        }
        unreachable!("an ordinary pair of roots contains a unit")
    }
}

impl Serialize for HeckeData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HeckeData", 4)?;
        st.serialize_field("p", &self.ring.p)?;
        st.serialize_field("ap", &self.ring.ap)?;
        st.serialize_field("eps", &self.ring.eps)?;
        st.serialize_field("n_max", &self.n_max)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HeckeData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            p: u32,
            ap: i64,
            eps: i8,
            #[serde(default = "default_n_max")]
            n_max: u32,
        }
        fn default_n_max() -> u32 {
            DEFAULT_N_MAX
        }
        let w = Wire::deserialize(d)?;
        HeckeData::with_n_max(w.p, w.ap, w.eps, w.n_max).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for HeckeData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} ap={} eps={:+} ({})",
            self.ring.p,
            self.ring.ap,
            self.ring.eps,
            self.classify()
        )
    }
}

/// Inverse of `a` modulo the prime `p`, by Fermat's little theorem.
fn inv_mod_p(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of a multiple of p");
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((u128::from(acc) * u128::from(base)) % u128::from(p)) as u64;
        }
        base = ((u128::from(base) * u128::from(base)) % u128::from(p)) as u64;
        exp >>= 1;
    }
    acc
}
