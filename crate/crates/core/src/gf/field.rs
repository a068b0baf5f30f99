use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which full operation tables are built.
pub const MAX_TABLE_ORDER: u64 = 1024;

/// An element of F_q, stored as the integer whose base-p digits (low to high)
/// are its coordinates in the polynomial basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// F_q with q = p^n, p odd. Arithmetic goes through precomputed tables.
pub struct FieldDesc {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}

impl Eq for FieldDesc {}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= m {
        if m % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Build F_{p^n} with the canonical modulus.
pub fn make_field(p: u32, n: u32) -> Result<Arc<FieldDesc>> {
    if p == 2 {
        return Err(Error::CharTwoUnsupported);
    }
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if n == 0 {
        return Err(Error::InvalidDegree(n));
    }
    let q = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
    if q > MAX_TABLE_ORDER {
        return Err(Error::FieldTooLarge(q));
    }
    if n == 1 {
        return Ok(Arc::new(prime_field(p)));
    }
    let modulus = canonical_modulus(p, n);
    Ok(Arc::new(extension_field(p, n, modulus)))
}

fn prime_field(p: u32) -> FieldDesc {
    let q = p as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            add[a * q + b] = ((a + b) % q) as u32;
            mul[a * q + b] = ((a * b) % q) as u32;
        }
    }
    finish(p, 1, vec![0, 1], add, mul)
}

fn finish(p: u32, n: u32, modulus: Vec<u32>, add: Vec<u32>, mul: Vec<u32>) -> FieldDesc {
    let q = p.pow(n) as usize;
    let mut neg = vec![0u32; q];
    let mut inv = vec![0u32; q];
    for a in 0..q {
        for b in 0..q {
            if add[a * q + b] == 0 {
                neg[a] = b as u32;
            }
            if mul[a * q + b] == 1 {
                inv[a] = b as u32;
            }
        }
    }
    FieldDesc {
        p,
        n,
        q: q as u32,
        modulus,
        add,
        mul,
        neg,
        inv,
    }
}

// Dense polynomials over F_p as digit vectors, used only while building tables.
fn digits_of(mut x: usize, p: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn from_digits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn mulmod_p(a: &[usize], b: &[usize], modulus: &[u32], p: usize) -> Vec<usize> {
    let n = modulus.len() - 1;
    let mut prod = vec![0usize; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..n {
            let sub = (c * modulus[i] as usize) % p;
            prod[k - n + i] = (prod[k - n + i] + p - sub) % p;
        }
    }
    prod.truncate(n);
    prod.resize(n, 0);
    prod
}

fn is_irreducible_over_prime(poly: &[u32], p: u32) -> bool {
    let fp = prime_field(p);
    let f = super::UniPoly::new(poly.iter().map(|&c| FieldElem(c)).collect());
    super::factor::is_irreducible(&fp, &f)
}

fn canonical_modulus(p: u32, n: u32) -> Vec<u32> {
    let pu = p as usize;
    let count = pu.pow(n);
    let mut best: Option<Vec<u32>> = None;
    for k in 0..count {
        let mut low: Vec<u32> = digits_of(k, pu, n as usize)
            .into_iter()
            .map(|d| d as u32)
            .collect();
        if low[0] == 0 {
            continue;
        }
        low.push(1);
        if let Some(b) = &best {
            if low.as_slice() >= b.as_slice() {
                continue;
            }
        }
        if is_irreducible_over_prime(&low, p) {
            best = Some(low);
        }
    }
    best.expect("an irreducible polynomial of every degree exists")
}

fn extension_field(p: u32, n: u32, modulus: Vec<u32>) -> FieldDesc {
    let pu = p as usize;
    let nu = n as usize;
    let q = pu.pow(n);
    let digits: Vec<Vec<usize>> = (0..q).map(|x| digits_of(x, pu, nu)).collect();
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    for a in 0..q {
        for b in a..q {
            let s: Vec<usize> = digits[a]
                .iter()
                .zip(&digits[b])
                .map(|(x, y)| (x + y) % pu)
                .collect();
            let sv = from_digits(&s, pu) as u32;
            let m = from_digits(&mulmod_p(&digits[a], &digits[b], &modulus, pu), pu) as u32;
            add[a * q + b] = sv;
            add[b * q + a] = sv;
            mul[a * q + b] = m;
            mul[b * q + a] = m;
        }
    }
    finish(p, n, modulus, add, mul)
}

impl FieldDesc {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            n: self.n,
            modulus: self.modulus.clone(),
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.index()])
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.index() * self.q as usize + b.index()])
    }

    /// Inverse of a nonzero element; panics on zero.
    #[inline]
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(!a.is_zero(), "inverse of zero");
        FieldElem(self.inv[a.index()])
    }

    pub fn try_inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            Err(Error::ZeroElement)
        } else {
            Ok(FieldElem(self.inv[a.index()]))
        }
    }

    #[inline]
    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElem, mut e: u128) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_digits(&self, digits: &[i64]) -> Result<FieldElem> {
        if digits.len() > self.n as usize {
            return Err(Error::InvalidElement);
        }
        let p = self.p as i64;
        let v = digits
            .iter()
            .rev()
            .fold(0i64, |acc, &d| acc * p + d.rem_euclid(p));
        Ok(FieldElem(v as u32))
    }

    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut x = a.0;
        (0..self.n)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    /// Ordering key comparing coordinates low degree first.
    pub fn lex_key(&self, a: FieldElem) -> Vec<u32> {
        self.digits(a)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u128)
    }

    /// Quadratic residue test by Euler's criterion.
    pub fn is_square(&self, a: FieldElem) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, (self.q as u128 - 1) / 2) == self.one())
    }

    /// p-th root (inverse Frobenius).
    pub fn pth_root(&self, a: FieldElem) -> FieldElem {
        self.pow(a, (self.q / self.p) as u128)
    }

    pub fn format(&self, a: FieldElem) -> String {
        if self.n == 1 {
            a.0.to_string()
        } else {
            format!("{:?}", self.digits(a))
        }
    }
}
