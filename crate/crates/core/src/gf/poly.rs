use std::cmp::Ordering;

use super::{FieldDesc, FieldElem};

/// Polynomial over F_q, coefficients constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UniPoly {
    coeffs: Vec<FieldElem>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![FieldElem::ONE],
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        UniPoly::new(vec![c])
    }

    /// The polynomial t.
    pub fn x() -> Self {
        UniPoly {
            coeffs: vec![FieldElem::ZERO, FieldElem::ONE],
        }
    }

    pub fn from_ints(f: &FieldDesc, coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| f.from_int(c)).collect())
    }

    pub fn monomial(c: FieldElem, k: usize) -> Self {
        let mut v = vec![FieldElem::ZERO; k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == FieldElem::ONE
    }

    pub fn add(&self, other: &Self, f: &FieldDesc) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| f.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self, f: &FieldDesc) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| f.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, f: &FieldDesc) -> Self {
        UniPoly::new(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: FieldElem, f: &FieldDesc) -> Self {
        UniPoly::new(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &FieldDesc) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(out)
    }

    /// Quotient and remainder; panics if `other` is zero.
    pub fn divrem(&self, other: &Self, f: &FieldDesc) -> (Self, Self) {
        let dd = other.degree().expect("division by zero polynomial");
        let inv_lc = f.inv(other.lc());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quo = vec![FieldElem::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let m = f.mul(c, inv_lc);
            quo[k - dd] = m;
            for (i, &oc) in other.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = f.sub(rem[idx], f.mul(m, oc));
            }
        }
        rem.truncate(dd);
        (UniPoly::new(quo), UniPoly::new(rem))
    }

    pub fn rem(&self, other: &Self, f: &FieldDesc) -> Self {
        self.divrem(other, f).1
    }

    pub fn monic(&self, f: &FieldDesc) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(f.inv(self.lc()), f)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self, f: &FieldDesc) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Returns (g, u, v) with u·self + v·other = g monic.
    pub fn xgcd(&self, other: &Self, f: &FieldDesc) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(&r1, f);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qt.mul(&s1, f), f);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&qt.mul(&t1, f), f);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = f.inv(r0.lc());
        (r0.scale(c, f), s0.scale(c, f), t0.scale(c, f))
    }

    pub fn derivative(&self, f: &FieldDesc) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: FieldElem, f: &FieldDesc) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// self^e mod m.
    pub fn pow_mod(&self, mut e: u128, m: &Self, f: &FieldDesc) -> Self {
        let mut base = self.rem(m, f);
        let mut acc = UniPoly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            base = base.mul(&base, f).rem(m, f);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, e: u32, f: &FieldDesc) -> Self {
        (0..e).fold(UniPoly::one(), |acc, _| acc.mul(self, f))
    }

    /// Ordering used for closed points: degree, then coefficients low degree first.
    pub fn canonical_cmp(&self, other: &Self, f: &FieldDesc) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| {
            for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
                let o = f.lex_key(*a).cmp(&f.lex_key(*b));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }

    pub fn format(&self, f: &FieldDesc) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = f.format(c);
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let term = if i == 0 {
                cs
            } else if c == FieldElem::ONE {
                mono
            } else {
                format!("{cs}*{mono}")
            };
            terms.push(term);
        }
        terms.join(" + ")
    }
}
