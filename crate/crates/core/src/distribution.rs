//! Distribution matrices on `p`-adic cosets from digit products.
//!
//! The value on the coset `b + p^n·Z_p` is the product
//!
//! ```text
//! μ(b + p^n·Z_p) = Y_{b_0} · Y_{b_1} · … · Y_{b_{n−1}} · R_n
//! ```
//!
//! where `b_0, …, b_{n−1}` are the base-`p` digits of `b` (least significant
//! first), `Y_d` depends only on whether the digit vanishes — see
//! [`chromatic`] — and `R_n` is the depth-`n` normalization matrix.  The
//! factor for a zero digit is the companion matrix with `−ε·p` replaced by
//! `−ε`; every nonzero digit contributes the same rank-one matrix, which is
//! why adjacent nonzero digits annihilate the product.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::digits::{digits, DigitString, RunStructure};
use crate::error::{Error, Result};
use crate::hecke::{Classification, HeckeData};
use crate::matrix::QuadMat2;
use crate::tensor::{kron_mixed, kron_same, TwoVarValue};

/// The digit factor `Y_d`: `[[a_p, 1], [−ε, 0]]` when `d = 0`, and
/// `[[0, 0], [−ε, 0]]` for every nonzero `d < p`.
pub fn chromatic(ctx: &HeckeData, digit: u32) -> Result<QuadMat2> {
    if digit >= ctx.p() {
        return Err(Error::DigitOutOfRange {
            digit,
            p: ctx.p(),
        });
    }
    let eps = -i64::from(ctx.eps());
    Ok(if digit == 0 {
        QuadMat2::from_ints(ctx.ring(), ctx.ap(), 1, eps, 0)
    } else {
        QuadMat2::from_ints(ctx.ring(), 0, 0, eps, 0)
    })
}

/// The distribution matrix on `b + p^n·Z_p`, `1 ≤ n ≤ n_max`; `b` is
/// normalized to its canonical residue first.
pub fn mu_matrix(ctx: &HeckeData, b: &BigInt, n: u32) -> Result<QuadMat2> {
    Ok(mu(ctx, b, n)?.matrix)
}

/// [`mu_matrix`] together with the digit data that produced it.
pub fn mu(ctx: &HeckeData, b: &BigInt, n: u32) -> Result<DistributionValue> {
    if n < 1 || n > ctx.n_max() {
        return Err(Error::DepthOutOfRange {
            n,
            min: 1,
            max: ctx.n_max(),
        });
    }
    let ds = digits(b, n, ctx.p())?;
    let mut acc = QuadMat2::identity(ctx.ring());
    for &d in ds.digits() {
        acc = acc.checked_mul(&chromatic(ctx, d)?)?;
    }
    let matrix = acc.checked_mul(&ctx.root_matrix(n))?;

    let mut flags = Vec::new();
    if ctx.classify() == Classification::Ordinary {
        flags.push(Flag::FirstColumnCertified);
    }
    if matrix.is_zero() {
        flags.push(Flag::Vanishing);
    }
    let runs = ds.run_structure();
    Ok(DistributionValue {
        ctx: *ctx,
        digits: ds,
        runs,
        matrix,
        flags,
    })
}

/// The Kronecker product `μ₁(b₁ + p₁^{n₁}·Z_{p₁}) ⊗ μ₂(b₂ + p₂^{n₂}·Z_{p₂})`
/// of two one-variable values; same-context pairs stay in their common ring,
/// mixed pairs land in the tensor ring.
pub fn mu_two_variable(
    ctx1: &HeckeData,
    b1: &BigInt,
    n1: u32,
    ctx2: &HeckeData,
    b2: &BigInt,
    n2: u32,
) -> Result<TwoVarValue> {
    let m1 = mu_matrix(ctx1, b1, n1)?;
    let m2 = mu_matrix(ctx2, b2, n2)?;
    if ctx1.ring() == ctx2.ring() {
        Ok(TwoVarValue::Same(kron_same(&m1, &m2)?))
    } else {
        Ok(TwoVarValue::Mixed(kron_mixed(&m1, &m2)))
    }
}

/// Structural annotations carried by a [`DistributionValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// Ordinary context: only the first matrix column is certified by the
    /// bounded (unit-root) part of the theory; the second column diverges
    /// `p`-adically as `n` grows.
    FirstColumnCertified,
    /// The matrix is identically zero.
    Vanishing,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::FirstColumnCertified => write!(f, "first-column-certified"),
            Flag::Vanishing => write!(f, "vanishing"),
        }
    }
}

/// A distribution value with its provenance: context, digits, run structure,
/// matrix, and flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionValue {
    pub ctx: HeckeData,
    pub digits: DigitString,
    pub runs: RunStructure,
    pub matrix: QuadMat2,
    pub flags: Vec<Flag>,
}

impl DistributionValue {
    /// The canonical residue `b`.
    pub fn b(&self) -> BigUint {
        self.digits.value()
    }

    /// The depth `n`.
    pub fn n(&self) -> u32 {
        self.digits.n()
    }

    /// A structural explanation when the matrix vanishes for a reason
    /// readable off the digits.
    pub fn vanishing_note(&self) -> Option<&'static str> {
        if self.matrix.is_zero() && self.digits.has_adjacent_nonzero() {
            Some("adjacent nonzero digits force the zero matrix")
        } else {
            None
        }
    }
}

impl Serialize for DistributionValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DistributionValue", 7)?;
        st.serialize_field("ctx", &self.ctx)?;
        st.serialize_field("b", &self.b().to_string())?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("digits", &self.digits)?;
        st.serialize_field("runs", &self.runs)?;
        st.serialize_field("matrix", &self.matrix)?;
        st.serialize_field("flags", &self.flags)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ctx(p: u32, ap: i64, eps: i8) -> HeckeData {
        HeckeData::new(p, ap, eps).unwrap()
    }

    fn big(b: i64) -> BigInt {
        BigInt::from(b)
    }

    #[test]
    fn chromatic_shapes() {
        let c = ctx(5, 1, -1);
        assert_eq!(
            chromatic(&c, 0).unwrap(),
            QuadMat2::from_ints(c.ring(), 1, 1, 1, 0)
        );
        for d in 1..5 {
            assert_eq!(
                chromatic(&c, d).unwrap(),
                QuadMat2::from_ints(c.ring(), 0, 0, 1, 0)
            );
        }
        assert!(matches!(
            chromatic(&c, 5),
            Err(Error::DigitOutOfRange { digit: 5, p: 5 })
        ));
    }

    #[test]
    fn chromatic_sums_to_companion() {
        for c in [ctx(3, 0, 1), ctx(2, 1, -1), ctx(5, -5, 1)] {
            let z = chromatic(&c, 0).unwrap();
            let nz = chromatic(&c, 1).unwrap();
            let sum = z.checked_add(&nz.scale(&crate::rational::rat(i64::from(c.p()) - 1)))
                .unwrap();
            assert_eq!(sum, c.companion());
        }
    }

    #[test]
    fn depth_one_base_coset() {
        // b = 0, n = 1: a single zero digit, so μ = [[a_p,1],[−ε,0]]·R_1.
        for c in [ctx(3, 0, 1), ctx(3, 2, -1), ctx(2, 1, 1)] {
            let expected = chromatic(&c, 0)
                .unwrap()
                .checked_mul(&c.root_matrix(1))
                .unwrap();
            assert_eq!(mu_matrix(&c, &big(0), 1).unwrap(), expected);
        }
    }

    #[test]
    fn adjacent_nonzero_digits_vanish() {
        // b = 4 = [1, 1] in base 3.
        let c = ctx(3, 0, 1);
        let v = mu(&c, &big(4), 2).unwrap();
        assert!(v.matrix.is_zero());
        assert!(v.flags.contains(&Flag::Vanishing));
        assert_eq!(
            v.vanishing_note(),
            Some("adjacent nonzero digits force the zero matrix")
        );
        // ...and at any a_p with p | a_p the same collapse happens.
        assert!(mu_matrix(&ctx(3, -3, -1), &big(4), 2).unwrap().is_zero());
    }

    #[test]
    fn frozen_value_at_depth_three() {
        // p = 3, a_p = 0, ε = 1, b = 10 = [1, 0, 1]: the digit product is
        // [[0,0],[1,0]] and μ = [[0, 0], [α/27, −α/27]].
        let c = ctx(3, 0, 1);
        let r = c.ring();
        let expected = QuadMat2::new(
            r,
            [
                r.zero(),
                r.zero(),
                r.alpha().scale(&ratio(1, 27)),
                r.alpha().scale(&ratio(-1, 27)),
            ],
        )
        .unwrap();
        assert_eq!(mu_matrix(&c, &big(10), 3).unwrap(), expected);
    }

    #[test]
    fn residue_normalization() {
        let c = ctx(3, 1, 1);
        assert_eq!(
            mu_matrix(&c, &big(-1), 2).unwrap(),
            mu_matrix(&c, &big(8), 2).unwrap()
        );
        assert_eq!(
            mu_matrix(&c, &big(7 + 9), 2).unwrap(),
            mu_matrix(&c, &big(7), 2).unwrap()
        );
    }

    #[test]
    fn refinement_additivity() {
        for c in [ctx(3, 0, 1), ctx(3, 1, -1), ctx(2, 2, -1)] {
            let p = i64::from(c.p());
            for n in 1..=2u32 {
                let pn = p.pow(n);
                for b in 0..pn {
                    let coarse = mu_matrix(&c, &big(b), n).unwrap();
                    let mut sum = QuadMat2::zero(c.ring());
                    for j in 0..p {
                        sum = sum
                            .checked_add(&mu_matrix(&c, &big(b + j * pn), n + 1).unwrap())
                            .unwrap();
                    }
                    assert_eq!(sum, coarse, "{c} b={b} n={n}");
                }
            }
        }
    }

    #[test]
    fn conjugation_swaps_columns() {
        for c in [ctx(3, 0, 1), ctx(5, 1, -1), ctx(2, -2, 1)] {
            for b in [0i64, 3, 7] {
                let m = mu_matrix(&c, &big(b), 2).unwrap();
                assert_eq!(m.conj_entrywise(), m.swap_columns(), "{c} b={b}");
            }
        }
    }

    #[test]
    fn ordinary_flag() {
        let v = mu(&ctx(5, 1, 1), &big(3), 2).unwrap();
        assert!(v.flags.contains(&Flag::FirstColumnCertified));
        let w = mu(&ctx(5, 5, 1), &big(3), 2).unwrap();
        assert!(!w.flags.contains(&Flag::FirstColumnCertified));
    }

    #[test]
    fn record_serialization() {
        let v = mu(&ctx(3, 0, 1), &big(10), 3).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["b"], "10");
        assert_eq!(j["n"], 3);
        assert_eq!(j["digits"], serde_json::json!([1, 0, 1]));
        assert_eq!(j["runs"], serde_json::json!([0, 1, 0]));
        assert_eq!(j["ctx"]["p"], 3);
        // matrix round-trips bit-exactly
        let back = QuadMat2::from_json(v.ctx.ring(), &j["matrix"]).unwrap();
        assert_eq!(back, v.matrix);
    }

    #[test]
    fn two_variable_kronecker() {
        let c1 = ctx(3, 0, 1);
        // same ring: plain 4×4 over Q(α)
        match mu_two_variable(&c1, &big(1), 1, &c1, &big(0), 1).unwrap() {
            TwoVarValue::Same(k) => {
                let m1 = mu_matrix(&c1, &big(1), 1).unwrap();
                let m2 = mu_matrix(&c1, &big(0), 1).unwrap();
                assert_eq!(
                    k.entry(2, 1),
                    &m1.entry(1, 0).checked_mul(m2.entry(0, 1)).unwrap()
                );
            }
            TwoVarValue::Mixed(_) => panic!("same-ring pair must stay in its ring"),
        }
        // mixed rings: tensor-valued
        let c2 = ctx(3, 3, 1);
        assert!(matches!(
            mu_two_variable(&c1, &big(1), 1, &c2, &big(1), 1).unwrap(),
            TwoVarValue::Mixed(_)
        ));
        // a vanishing factor kills the product
        let z = mu_two_variable(&c1, &big(4), 2, &c2, &big(1), 1).unwrap();
        assert!(z.is_zero());
    }
}
