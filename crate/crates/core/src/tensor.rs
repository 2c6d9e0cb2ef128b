//! Kronecker products of distribution matrices, in one ring or two.
//!
//! Two cosets from the *same* context multiply inside that context's ring,
//! and the Kronecker product is an ordinary 4×4 matrix over it.  Cosets from
//! *different* contexts need the tensor of the two quadratic rings: a
//! [`TensorElem`] is an element of `Q(α₁) ⊗ Q(α₂)`, stored as a pair of
//! second-ring coordinates along `{1, α₁}` so all the arithmetic reuses the
//! quadratic reduction of each factor.

use crate::error::{Error, Result};
use crate::matrix::QuadMat2;
use crate::quad::{QuadElem, QuadRing};

/// An element of `Q(α₁) ⊗ Q(α₂)`, written `c0 + c1·α₁` with `c0, c1` in the
/// second ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElem {
    outer: QuadRing,
    c0: QuadElem,
    c1: QuadElem,
}

impl TensorElem {
    /// The zero tensor over the pair of rings.
    pub fn zero(outer: QuadRing, inner: QuadRing) -> Self {
        TensorElem {
            outer,
            c0: inner.zero(),
            c1: inner.zero(),
        }
    }

    /// The pure tensor `x ⊗ y`.
    pub fn from_pair(x: &QuadElem, y: &QuadElem) -> Self {
        TensorElem {
            outer: *x.ring(),
            c0: y.scale(x.c0()),
            c1: y.scale(x.c1()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    fn same_rings(&self, other: &TensorElem) -> Result<()> {
        if self.outer != other.outer {
            return Err(Error::MixedRings(
                self.outer.p,
                self.outer.ap,
                self.outer.eps,
                other.outer.p,
                other.outer.ap,
                other.outer.eps,
            ));
        }
        // inner mismatch surfaces through the coordinate operations
        Ok(())
    }

    pub fn checked_add(&self, other: &TensorElem) -> Result<TensorElem> {
        self.same_rings(other)?;
        Ok(TensorElem {
            outer: self.outer,
            c0: self.c0.checked_add(&other.c0)?,
            c1: self.c1.checked_add(&other.c1)?,
        })
    }

    pub fn checked_sub(&self, other: &TensorElem) -> Result<TensorElem> {
        self.same_rings(other)?;
        Ok(TensorElem {
            outer: self.outer,
            c0: self.c0.checked_sub(&other.c0)?,
            c1: self.c1.checked_sub(&other.c1)?,
        })
    }

    /// Product, reducing `α₁²` by the outer relation while the coordinates
    /// multiply in the inner ring.
    pub fn checked_mul(&self, other: &TensorElem) -> Result<TensorElem> {
        self.same_rings(other)?;
        let ap = crate::rational::rat(self.outer.ap);
        let epsp = crate::rational::rat(i64::from(self.outer.eps) * i64::from(self.outer.p));
        let cross = self.c1.checked_mul(&other.c1)?;
        let c0 = self
            .c0
            .checked_mul(&other.c0)?
            .checked_sub(&cross.scale(&epsp))?;
        let c1 = self
            .c0
            .checked_mul(&other.c1)?
            .checked_add(&self.c1.checked_mul(&other.c0)?)?
            .checked_add(&cross.scale(&ap))?;
        Ok(TensorElem {
            outer: self.outer,
            c0,
            c1,
        })
    }
}

/// A 4×4 matrix over a single quadratic ring: the same-context Kronecker
/// product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadMat4 {
    ring: QuadRing,
    e: Vec<QuadElem>,
}

impl QuadMat4 {
    pub fn zero(ring: QuadRing) -> Self {
        QuadMat4 {
            ring,
            e: vec![ring.zero(); 16],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &QuadElem {
        assert!(i < 4 && j < 4, "index out of range for a 4x4 matrix");
        &self.e[4 * i + j]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(QuadElem::is_zero)
    }

    pub fn checked_add(&self, other: &QuadMat4) -> Result<QuadMat4> {
        let mut e = Vec::with_capacity(16);
        for (x, y) in self.e.iter().zip(&other.e) {
            e.push(x.checked_add(y)?);
        }
        Ok(QuadMat4 { ring: self.ring, e })
    }
}

/// A 4×4 matrix over a tensor of two quadratic rings: the mixed-context
/// Kronecker product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorMat4 {
    e: Vec<TensorElem>,
}

impl TensorMat4 {
    pub fn entry(&self, i: usize, j: usize) -> &TensorElem {
        assert!(i < 4 && j < 4, "index out of range for a 4x4 matrix");
        &self.e[4 * i + j]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(TensorElem::is_zero)
    }

    pub fn checked_add(&self, other: &TensorMat4) -> Result<TensorMat4> {
        let mut e = Vec::with_capacity(16);
        for (x, y) in self.e.iter().zip(&other.e) {
            e.push(x.checked_add(y)?);
        }
        Ok(TensorMat4 { e })
    }
}

/// Kronecker product of two matrices over the *same* ring:
/// `(A ⊗ B)[(2i₁+i₂),(2j₁+j₂)] = A[i₁,j₁]·B[i₂,j₂]`.
pub fn kron_same(a: &QuadMat2, b: &QuadMat2) -> Result<QuadMat4> {
    if a.ring() != b.ring() {
        return Err(Error::MixedRings(
            a.ring().p,
            a.ring().ap,
            a.ring().eps,
            b.ring().p,
            b.ring().ap,
            b.ring().eps,
        ));
    }
    let mut e = Vec::with_capacity(16);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    e.push(a.entry(i1, j1).checked_mul(b.entry(i2, j2))?);
                }
            }
        }
    }
    Ok(QuadMat4 { ring: *a.ring(), e })
}

/// Kronecker product of matrices over two different rings, valued in the
/// tensor ring.
pub fn kron_mixed(a: &QuadMat2, b: &QuadMat2) -> TensorMat4 {
    let mut e = Vec::with_capacity(16);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    e.push(TensorElem::from_pair(a.entry(i1, j1), b.entry(i2, j2)));
                }
            }
        }
    }
    TensorMat4 { e }
}

/// A two-variable distribution value: 4×4 over the common ring when both
/// cosets share a context ring, 4×4 over the tensor ring otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoVarValue {
    Same(QuadMat4),
    Mixed(TensorMat4),
}

impl TwoVarValue {
    pub fn is_zero(&self) -> bool {
        match self {
            TwoVarValue::Same(m) => m.is_zero(),
            TwoVarValue::Mixed(m) => m.is_zero(),
        }
    }

    /// Sum of two values of the same shape.
    ///
    /// # Panics
    ///
    /// Panics when one side is same-ring and the other mixed; the shape is a
    /// function of the context pair, so this only arises from misuse.
    pub fn checked_add(&self, other: &TwoVarValue) -> Result<TwoVarValue> {
        match (self, other) {
            (TwoVarValue::Same(a), TwoVarValue::Same(b)) => {
                Ok(TwoVarValue::Same(a.checked_add(b)?))
            }
            (TwoVarValue::Mixed(a), TwoVarValue::Mixed(b)) => {
                Ok(TwoVarValue::Mixed(a.checked_add(b)?))
            }
            _ => panic!("cannot add same-ring and mixed-ring Kronecker values"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn ring(p: u32, ap: i64, eps: i8) -> QuadRing {
        QuadRing::new(p, ap, eps).unwrap()
    }

    #[test]
    fn pure_tensor_multiplication() {
        // (x₁ ⊗ y₁)·(x₂ ⊗ y₂) = (x₁x₂) ⊗ (y₁y₂)
        let r1 = ring(3, 0, 1);
        let r2 = ring(5, 1, -1);
        let x1 = r1.elem(rat(1), rat(2));
        let x2 = r1.elem(ratio(1, 3), rat(-1));
        let y1 = r2.alpha();
        let y2 = r2.elem(rat(2), ratio(1, 5));
        let lhs = TensorElem::from_pair(&x1, &y1)
            .checked_mul(&TensorElem::from_pair(&x2, &y2))
            .unwrap();
        let rhs = TensorElem::from_pair(
            &x1.checked_mul(&x2).unwrap(),
            &y1.checked_mul(&y2).unwrap(),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_distributes() {
        let r1 = ring(2, 2, -1);
        let r2 = ring(3, 1, 1);
        let a = TensorElem::from_pair(&r1.alpha(), &r2.one());
        let b = TensorElem::from_pair(&r1.one(), &r2.alpha());
        let c = TensorElem::from_pair(&r1.beta(), &r2.beta());
        let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        let rhs = a
            .checked_mul(&b)
            .unwrap()
            .checked_add(&a.checked_mul(&c).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn kron_same_is_bilinear() {
        let r = ring(3, 0, -1);
        let a = QuadMat2::from_ints(r, 1, 2, 0, 1);
        let b = QuadMat2::from_ints(r, 0, 1, -1, 3);
        let c = QuadMat2::new(r, [r.alpha(), r.zero(), r.one(), r.beta()]).unwrap();
        let lhs = kron_same(&a.checked_add(&b).unwrap(), &c).unwrap();
        let rhs = kron_same(&a, &c)
            .unwrap()
            .checked_add(&kron_same(&b, &c).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(kron_same(&a, &QuadMat2::zero(r)).unwrap().is_zero());
    }

    #[test]
    fn kron_same_rejects_mixed() {
        let a = QuadMat2::identity(ring(3, 0, 1));
        let b = QuadMat2::identity(ring(3, 1, 1));
        assert!(matches!(kron_same(&a, &b), Err(Error::MixedRings(..))));
    }

    #[test]
    fn kron_mixed_entries() {
        let r1 = ring(3, 0, 1);
        let r2 = ring(2, 1, -1);
        let a = QuadMat2::new(r1, [r1.alpha(), r1.zero(), r1.one(), r1.int(2)]).unwrap();
        let b = QuadMat2::identity(r2);
        let k = kron_mixed(&a, &b);
        // (A ⊗ I)[(0,0),(0,0)] = A[0,0]
        assert_eq!(
            *k.entry(0, 0),
            TensorElem::from_pair(&r1.alpha(), &r2.one())
        );
        // off-diagonal inner blocks vanish
        assert!(k.entry(0, 1).is_zero());
        assert_eq!(
            *k.entry(2, 0),
            TensorElem::from_pair(&r1.one(), &r2.one())
        );
    }
}
