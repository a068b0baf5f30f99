use std::sync::Arc;

use super::{FieldDesc, FieldElem, UniPoly};
use crate::error::{Error, Result};

/// Element of F_q[t]/(m): coordinates in the basis 1, θ, …, θ^{deg m − 1}.
pub type ResElem = Vec<FieldElem>;

/// F_{q^m} realized as F_q[t]/(m) for a monic irreducible m.
#[derive(Clone, Debug)]
pub struct ResidueField {
    base: Arc<FieldDesc>,
    modulus: UniPoly,
    degree: usize,
}

impl ResidueField {
    pub fn new(base: Arc<FieldDesc>, modulus: UniPoly) -> Self {
        let degree = modulus.degree().expect("nonzero modulus");
        assert!(degree >= 1 && modulus.is_monic());
        ResidueField {
            base,
            modulus,
            degree,
        }
    }

    /// F_q itself, as F_q[t]/(t).
    pub fn trivial(base: Arc<FieldDesc>) -> Self {
        ResidueField::new(base, UniPoly::x())
    }

    pub fn base(&self) -> &FieldDesc {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FieldDesc> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &UniPoly {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.base.q() as u128).pow(self.degree as u32)
    }

    pub fn zero(&self) -> ResElem {
        vec![FieldElem::ZERO; self.degree]
    }

    pub fn one(&self) -> ResElem {
        self.from_base(FieldElem::ONE)
    }

    pub fn from_base(&self, c: FieldElem) -> ResElem {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// Class of t.
    pub fn theta(&self) -> ResElem {
        self.from_poly(&UniPoly::x())
    }

    pub fn from_poly(&self, g: &UniPoly) -> ResElem {
        let r = g.rem(&self.modulus, &self.base);
        let mut v = self.zero();
        for (i, &c) in r.coeffs().iter().enumerate() {
            v[i] = c;
        }
        v
    }

    pub fn to_poly(&self, a: &[FieldElem]) -> UniPoly {
        UniPoly::new(a.to_vec())
    }

    pub fn is_zero(&self, a: &[FieldElem]) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &[FieldElem], b: &[FieldElem]) -> ResElem {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[FieldElem], b: &[FieldElem]) -> ResElem {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[FieldElem]) -> ResElem {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }

    pub fn scale(&self, a: &[FieldElem], c: FieldElem) -> ResElem {
        a.iter().map(|&x| self.base.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &[FieldElem], b: &[FieldElem]) -> ResElem {
        if self.degree == 1 {
            return vec![self.base.mul(a[0], b[0])];
        }
        let f = &self.base;
        let m = self.degree;
        let mut prod = vec![FieldElem::ZERO; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        let mc = self.modulus.coeffs();
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            if c.is_zero() {
                continue;
            }
            for i in 0..m {
                prod[k - m + i] = f.sub(prod[k - m + i], f.mul(c, mc[i]));
            }
        }
        prod.truncate(m);
        prod
    }

    pub fn inv(&self, a: &[FieldElem]) -> Result<ResElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        let (g, u, _) = self.to_poly(a).xgcd(&self.modulus, &self.base);
        debug_assert_eq!(g.degree(), Some(0));
        Ok(self.from_poly(&u))
    }

    pub fn div(&self, a: &[FieldElem], b: &[FieldElem]) -> Result<ResElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &[FieldElem], mut e: u128) -> ResElem {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_square(&self, a: &[FieldElem]) -> Result<bool> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, (self.order() - 1) / 2) == self.one())
    }

    /// A square root, if one exists, found by exhaustive search over κ.
    pub fn sqrt(&self, a: &[FieldElem]) -> Option<ResElem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a).ok()? {
            return None;
        }
        self.elements().find(|y| self.mul(y, y) == a)
    }

    pub fn elements(&self) -> impl Iterator<Item = ResElem> + '_ {
        let q = self.base.q() as u128;
        (0..self.order()).map(move |mut k| {
            (0..self.degree)
                .map(|_| {
                    let c = (k % q) as u32;
                    k /= q;
                    FieldElem(c)
                })
                .collect()
        })
    }

    /// Lexicographic key, coordinates low degree first, each by its digits.
    pub fn lex_key(&self, a: &[FieldElem]) -> Vec<u32> {
        a.iter().flat_map(|&c| self.base.lex_key(c)).collect()
    }
}
