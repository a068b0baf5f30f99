use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FieldDesc, FieldElem, UniPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElem,
    pub factors: Vec<(UniPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, f: &FieldDesc) -> UniPoly {
        let mut acc = UniPoly::constant(self.unit);
        for (g, m) in &self.factors {
            acc = acc.mul(&g.pow(*m, f), f);
        }
        acc
    }
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= m {
        if m % k == 0 {
            out.push(k);
            while m % k == 0 {
                m /= k;
            }
        }
        k += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// t^(q^k) mod g.
fn frobenius_power(g: &UniPoly, k: u32, f: &FieldDesc) -> UniPoly {
    let mut h = UniPoly::x().rem(g, f);
    for _ in 0..k {
        h = h.pow_mod(f.q() as u128, g, f);
    }
    h
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &FieldDesc, g: &UniPoly) -> bool {
    let Some(m) = g.degree() else { return false };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let g = g.monic(f);
    let m = m as u32;
    let x = UniPoly::x();
    for r in prime_factors(m) {
        let h = frobenius_power(&g, m / r, f).sub(&x, f);
        if g.gcd(&h, f).degree() != Some(0) {
            return false;
        }
    }
    frobenius_power(&g, m, f).sub(&x, f).rem(&g, f).is_zero()
}

/// p-th root of a polynomial whose derivative vanishes.
fn pth_root_poly(g: &UniPoly, f: &FieldDesc) -> UniPoly {
    let p = f.p() as usize;
    let coeffs = g
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| f.pth_root(c))
        .collect();
    UniPoly::new(coeffs)
}

/// Squarefree decomposition of a monic polynomial: (squarefree part, multiplicity).
fn squarefree(g: &UniPoly, f: &FieldDesc) -> Vec<(UniPoly, u32)> {
    let mut out = Vec::new();
    if g.degree().unwrap_or(0) == 0 {
        return out;
    }
    let p = f.p();
    let dg = g.derivative(f);
    if dg.is_zero() {
        for (h, m) in squarefree(&pth_root_poly(g, f), f) {
            out.push((h, m * p));
        }
        return out;
    }
    let mut c = g.gcd(&dg, f);
    let mut w = g.divrem(&c, f).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c, f);
        let fac = w.divrem(&y, f).0;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac.monic(f), i));
        }
        w = y;
        c = c.divrem(&w, f).0;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (h, m) in squarefree(&pth_root_poly(&c.monic(f), f), f) {
            out.push((h, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(g: &UniPoly, f: &FieldDesc) -> Vec<(UniPoly, u32)> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    let x = UniPoly::x();
    let mut h = x.clone();
    let mut k = 1u32;
    while let Some(deg) = rest.degree() {
        if deg < 2 * k as usize {
            break;
        }
        h = h.pow_mod(f.q() as u128, &rest, f);
        let d = rest.gcd(&h.sub(&x, f), f);
        if d.degree().unwrap_or(0) > 0 {
            rest = rest.divrem(&d, f).0;
            h = h.rem(&rest, f);
            out.push((d, k));
        }
        k += 1;
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest.monic(f), deg as u32));
        }
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of irreducibles of degree k.
fn equal_degree(g: &UniPoly, k: u32, f: &FieldDesc, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let n = g.degree().unwrap_or(0) as u32;
    if n == k {
        return vec![g.clone()];
    }
    let q = f.q() as u128;
    let e = (q.pow(k) - 1) / 2;
    loop {
        let r = UniPoly::new(
            (0..n)
                .map(|_| FieldElem(rng.gen_range(0..f.q())))
                .collect(),
        );
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let h = r.pow_mod(e, g, f).sub(&UniPoly::one(), f);
        let d = g.gcd(&h, f);
        let dd = d.degree().unwrap_or(0) as u32;
        if dd > 0 && dd < n {
            let other = g.divrem(&d, f).0.monic(f);
            let mut out = equal_degree(&d, k, f, rng);
            out.extend(equal_degree(&other, k, f, rng));
            return out;
        }
    }
}

/// Factor a nonzero polynomial into monic irreducibles, sorted canonically.
pub fn factor_poly(f: &FieldDesc, g: &UniPoly) -> Result<Factorization> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = g.lc();
    let monic = g.monic(f);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut factors = Vec::new();
    for (sq, mult) in squarefree(&monic, f) {
        for (part, k) in distinct_degree(&sq, f) {
            for irr in equal_degree(&part, k, f, &mut rng) {
                factors.push((irr.monic(f), mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0, f).then(a.1.cmp(&b.1)));
    let mut merged: Vec<(UniPoly, u32)> = Vec::new();
    for (h, m) in factors {
        match merged.last_mut() {
            Some((last, lm)) if *last == h => *lm += m,
            _ => merged.push((h, m)),
        }
    }
    Ok(Factorization {
        unit,
        factors: merged,
    })
}

pub fn is_squarefree(f: &FieldDesc, g: &UniPoly) -> bool {
    match g.degree() {
        None => false,
        Some(0) => true,
        Some(_) => g.gcd(&g.derivative(f), f).degree() == Some(0),
    }
}

/// All monic irreducible polynomials of degree m, in canonical order.
pub fn monic_irreducibles(f: &FieldDesc, m: usize) -> Vec<UniPoly> {
    let q = f.q() as u64;
    let total = q.pow(m as u32);
    let mut out = Vec::new();
    for k in 0..total {
        let mut c = Vec::with_capacity(m + 1);
        let mut x = k;
        for _ in 0..m {
            c.push(FieldElem((x % q) as u32));
            x /= q;
        }
        c.push(FieldElem::ONE);
        let g = UniPoly::new(c);
        if is_irreducible(f, &g) {
            out.push(g);
        }
    }
    out.sort_by(|a, b| a.canonical_cmp(b, f));
    out
}

/// Square test in F_q[t] for a nonzero polynomial: squarefree decomposition
/// with all multiplicities even and a square leading coefficient.
pub fn is_square_poly(f: &FieldDesc, g: &UniPoly) -> bool {
    if g.is_zero() {
        return true;
    }
    let lc_ok = f.is_square(g.lc()).unwrap_or(true);
    lc_ok && squarefree(&g.monic(f), f).iter().all(|(_, m)| m % 2 == 0)
}
