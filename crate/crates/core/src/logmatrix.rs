//! Truncations of the logarithm matrix attached to a Hecke context.
//!
//! The depth-`n` truncation is the polynomial matrix
//!
//! ```text
//! Log⁽ⁿ⁾(x) = Π_{i=1..n} [[a_p, 1], [−ε·Φ_{p^i}(x), 0]] · R_n
//! ```
//!
//! with `R_n` the normalization from [`HeckeData::root_matrix`].  Its
//! defining property is stability under evaluation at `p^k`-th roots of
//! unity: reduced modulo `Φ_{p^k}(x)`, every truncation of depth `n ≥ k`
//! agrees with the depth-`k` one, because `Φ_{p^i}(x) ≡ p mod Φ_{p^k}` for
//! `i > k` turns each deeper factor into the companion matrix, and the
//! companion powers are exactly what `R_n` absorbs.

use crate::error::{Error, Result};
use crate::hecke::HeckeData;
use crate::poly::{cyclotomic, eval_in_quotient, PolyMat2, PolyQ, Quotient};

/// The `i`-th product factor `[[a_p, 1], [−ε·Φ_{p^i}(x), 0]]`, `i ≥ 1`.
pub fn log_factor(ctx: &HeckeData, i: u32) -> Result<PolyMat2> {
    let r = ctx.ring();
    let phi = cyclotomic(r, i)?;
    PolyMat2::new(
        r,
        [
            PolyQ::constant(r.int(ctx.ap())),
            PolyQ::constant(r.one()),
            phi.scale_elem(&r.int(-i64::from(ctx.eps())))?,
            PolyQ::zero(r),
        ],
    )
}

/// The depth-`n` logarithm truncation, `1 ≤ n ≤ n_max`.  Entry degrees are
/// bounded by `p^n − 1`.
pub fn log_truncation(ctx: &HeckeData, n: u32) -> Result<PolyMat2> {
    if n < 1 || n > ctx.n_max() {
        return Err(Error::DepthOutOfRange {
            n,
            min: 1,
            max: ctx.n_max(),
        });
    }
    let mut acc = PolyMat2::identity(ctx.ring());
    for i in 1..=n {
        acc = acc.checked_mul(&log_factor(ctx, i)?)?;
    }
    acc.mul_quad(&ctx.root_matrix(n))
}

/// Checks the root-of-unity stability: the reductions of
/// `log_truncation(ctx, n)` and `log_truncation(ctx, k)` modulo `Φ_{p^k}`
/// must agree exactly, for `1 ≤ k ≤ n ≤ n_max`.
pub fn eval_lemma_check(ctx: &HeckeData, k: u32, n: u32) -> Result<bool> {
    if k < 1 || k > n {
        return Err(Error::DepthOutOfRange {
            n: k,
            min: 1,
            max: n,
        });
    }
    let deep = log_truncation(ctx, n)?;
    let shallow = log_truncation(ctx, k)?;
    let q = Quotient::cyclotomic(ctx.ring(), k)?;
    Ok(eval_in_quotient(&deep, &q) == eval_in_quotient(&shallow, &q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QuadMat2;
    use crate::rational::pow_u64;

    fn ctx(p: u32, ap: i64, eps: i8) -> HeckeData {
        HeckeData::new(p, ap, eps).unwrap()
    }

    #[test]
    fn degrees_are_bounded() {
        for c in [ctx(3, 0, 1), ctx(2, 1, -1), ctx(5, 2, 1)] {
            for n in 1..=3 {
                let m = log_truncation(&c, n).unwrap();
                let bound = pow_u64(c.p(), n).unwrap() as usize - 1;
                assert!(m.degree().unwrap() <= bound, "{c} at depth {n}");
            }
        }
        assert!(matches!(
            log_truncation(&ctx(3, 0, 1), 0),
            Err(Error::DepthOutOfRange { .. })
        ));
        assert!(matches!(
            log_truncation(&ctx(3, 0, 1), 13),
            Err(Error::DepthOutOfRange { .. })
        ));
    }

    #[test]
    fn constant_coefficient_is_digit_zero_product() {
        // Every Φ_{p^i} has constant coefficient 1, and no cross terms reach
        // degree zero, so the constant coefficient matrix is
        // [[a_p, 1], [−ε, 0]]^n · R_n.
        for c in [ctx(3, 0, 1), ctx(2, 2, -1), ctx(5, 1, 1)] {
            for n in 1..=3 {
                let m = log_truncation(&c, n).unwrap();
                let z = QuadMat2::from_ints(c.ring(), c.ap(), 1, -i64::from(c.eps()), 0);
                let expected = z
                    .pow(i64::from(n))
                    .unwrap()
                    .checked_mul(&c.root_matrix(n))
                    .unwrap();
                assert_eq!(m.coeff_matrix(0), expected, "{c} at depth {n}");
            }
        }
    }

    #[test]
    fn evaluation_at_one_is_depth_independent() {
        // Φ_{p^i}(1) = p turns every factor into the companion matrix, and
        // Cⁿ·R_n telescopes to the depth-zero normalization.
        for c in [ctx(3, 0, 1), ctx(3, -3, -1), ctx(2, 1, 1), ctx(5, 5, -1)] {
            let r0 = c.root_matrix(0);
            for n in 1..=4 {
                assert_eq!(
                    log_truncation(&c, n).unwrap().eval_one(),
                    r0,
                    "{c} at depth {n}"
                );
            }
        }
    }

    #[test]
    fn stability_under_cyclotomic_reduction() {
        // The p = 2 context exercises the shifted n + 3 exponent.
        assert!(eval_lemma_check(&ctx(2, 2, 1), 1, 3).unwrap());
        for c in [ctx(3, 0, 1), ctx(3, 1, -1), ctx(2, -1, -1), ctx(5, -5, 1)] {
            for k in 1..=2 {
                for n in k..=3 {
                    assert!(eval_lemma_check(&c, k, n).unwrap(), "{c} k={k} n={n}");
                }
            }
        }
        assert!(matches!(
            eval_lemma_check(&ctx(3, 0, 1), 0, 2),
            Err(Error::DepthOutOfRange { .. })
        ));
        assert!(matches!(
            eval_lemma_check(&ctx(3, 0, 1), 3, 2),
            Err(Error::DepthOutOfRange { .. })
        ));
    }

    #[test]
    fn factor_shape() {
        let c = ctx(3, 0, -1);
        let f = log_factor(&c, 2).unwrap();
        assert_eq!(f.entry(0, 0), &PolyQ::constant(c.ring().int(0)));
        assert_eq!(f.entry(0, 1), &PolyQ::constant(c.ring().one()));
        assert_eq!(f.entry(1, 0), &cyclotomic(c.ring(), 2).unwrap());
        assert!(f.entry(1, 1).is_zero());
    }
}
