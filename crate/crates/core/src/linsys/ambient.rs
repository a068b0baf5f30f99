//! Coefficient vectors for forms of degree d′ in (x, y, z) whose coefficients
//! are binary forms of degree A in (s, t).

use crate::bundle::ConicBundle;
use crate::gf::linalg::{rref, Echelon};
use crate::gf::{FieldDesc, FieldElem};

/// Exponent vectors of degree `deg` in graded lex order, x > y > z.
pub fn monomials(deg: usize) -> Vec<[u32; 3]> {
    let mut out = Vec::with_capacity((deg + 1) * (deg + 2) / 2);
    for i in (0..=deg).rev() {
        for j in (0..=deg - i).rev() {
            out.push([i as u32, j as u32, (deg - i - j) as u32]);
        }
    }
    out
}

pub fn mono_index(e: [u32; 3]) -> usize {
    let d = (e[0] + e[1] + e[2]) as usize;
    let (i, j) = (e[0] as usize, e[1] as usize);
    (d - i) * (d - i + 1) / 2 + (d - i - j)
}

/// Shape of an ambient space; coordinate of (monomial m, t-degree j) is m·(A+1)+j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    pub dprime: usize,
    pub coef: i64,
    pub monos: Vec<[u32; 3]>,
}

impl Ambient {
    pub fn new(dprime: usize, coef: i64) -> Self {
        Ambient {
            dprime,
            coef,
            monos: monomials(dprime),
        }
    }

    pub fn width(&self) -> usize {
        if self.coef < 0 {
            0
        } else {
            self.monos.len() * (self.coef as usize + 1)
        }
    }

    pub fn tdeg(&self) -> usize {
        self.coef.max(0) as usize
    }

    #[inline]
    pub fn coord(&self, mono: usize, j: usize) -> usize {
        mono * (self.tdeg() + 1) + j
    }

    #[inline]
    pub fn split(&self, coord: usize) -> (usize, usize) {
        (coord / (self.tdeg() + 1), coord % (self.tdeg() + 1))
    }
}

/// The subspace Q·(forms of degree d′−2 with coefficient degree A−l), in echelon form.
pub fn conic_multiples(bundle: &ConicBundle, amb: &Ambient) -> Echelon {
    let f = bundle.field();
    let n = amb.width();
    let l = bundle.l() as i64;
    if amb.dprime < 2 || amb.coef - l < 0 {
        return rref(Vec::new(), n, f);
    }
    let low = monomials(amb.dprime - 2);
    let forms = bundle.forms();
    let mut rows = Vec::new();
    for m in &low {
        for j in 0..=(amb.coef - l) as usize {
            let mut v = vec![FieldElem::ZERO; n];
            for (c, form) in forms.iter().enumerate() {
                let mut e = *m;
                e[c] += 2;
                let mi = mono_index(e);
                for (i, &fc) in form.coeffs().iter().enumerate() {
                    let k = amb.coord(mi, i + j);
                    v[k] = f.add(v[k], fc);
                }
            }
            rows.push(v);
        }
    }
    rref(rows, n, f)
}

/// Product of two ambient vectors.
pub fn multiply(
    f: &FieldDesc,
    a1: &Ambient,
    v1: &[FieldElem],
    a2: &Ambient,
    v2: &[FieldElem],
) -> (Ambient, Vec<FieldElem>) {
    let out = Ambient::new(a1.dprime + a2.dprime, a1.coef + a2.coef);
    let mut w = vec![FieldElem::ZERO; out.width()];
    for (c1, &x) in v1.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (m1, j1) = a1.split(c1);
        for (c2, &y) in v2.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let (m2, j2) = a2.split(c2);
            let e1 = a1.monos[m1];
            let e2 = a2.monos[m2];
            let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
            let k = out.coord(mono_index(e), j1 + j2);
            w[k] = f.add(w[k], f.mul(x, y));
        }
    }
    (out, w)
}

/// Multiply every coefficient by a binary form `p` of degree m.
pub fn multiply_binary(
    f: &FieldDesc,
    amb: &Ambient,
    v: &[FieldElem],
    p: &[FieldElem],
) -> (Ambient, Vec<FieldElem>) {
    let m = p.len() - 1;
    let out = Ambient::new(amb.dprime, amb.coef + m as i64);
    let mut w = vec![FieldElem::ZERO; out.width()];
    for (c, &x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (mi, j) = amb.split(c);
        for (i, &pc) in p.iter().enumerate() {
            let k = out.coord(mi, j + i);
            w[k] = f.add(w[k], f.mul(x, pc));
        }
    }
    (out, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order_and_index() {
        let m = monomials(2);
        assert_eq!(
            m,
            vec![[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]
        );
        for d in 0..6 {
            for (i, e) in monomials(d).into_iter().enumerate() {
                assert_eq!(mono_index(e), i);
            }
        }
    }
}
