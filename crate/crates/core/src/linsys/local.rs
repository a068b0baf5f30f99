//! Local expansions of ambient sections at a closed point: power series along
//! a split line (valuations) and normal forms on a whole fiber.

use std::collections::HashMap;

use super::ambient::{mono_index, monomials, Ambient};
use crate::bundle::{ConicBundle, SingularFiber};
use crate::curve::ClosedPoint;
use crate::gf::{FieldElem, ResElem, ResidueField};
use crate::picard::Side;

/// Polynomial in ξ over κ(P), constant term first.
type XiPoly = Vec<ResElem>;
/// Power series in u with ξ-polynomial coefficients.
type Series = Vec<XiPoly>;

fn xadd(k: &ResidueField, a: &XiPoly, b: &XiPoly) -> XiPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn xmul(k: &ResidueField, a: &XiPoly, b: &XiPoly) -> XiPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !k.is_zero(y) {
                out[i + j] = k.add(&out[i + j], &k.mul(x, y));
            }
        }
    }
    out
}

fn xscale(k: &ResidueField, a: &XiPoly, c: &ResElem) -> XiPoly {
    a.iter().map(|x| k.mul(x, c)).collect()
}

fn smul(k: &ResidueField, a: &Series, b: &Series, order: usize) -> Series {
    let mut out: Series = vec![Vec::new(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        for (j, y) in b.iter().enumerate().take(order - i) {
            let p = xmul(k, x, y);
            out[i + j] = xadd(k, &out[i + j], &p);
        }
    }
    out
}

/// Expansion of binary monomials around P in the local parameter u
/// (u = t − θ at a finite point, u = s at ∞).
#[derive(Clone, Debug)]
pub struct Expansion {
    pub k: ResidueField,
    inf: bool,
    order: usize,
    tpow: Vec<Vec<ResElem>>,
}

impl Expansion {
    pub fn new(k: &ResidueField, point: &ClosedPoint, order: usize, maxdeg: usize) -> Self {
        let inf = point.is_infinity();
        let mut tpow = Vec::new();
        if !inf {
            let theta = k.theta();
            let mut cur = vec![k.zero(); order];
            if order > 0 {
                cur[0] = k.one();
            }
            tpow.push(cur.clone());
            for _ in 0..maxdeg {
                let mut next = vec![k.zero(); order];
                for i in 0..order {
                    next[i] = k.add(&next[i], &k.mul(&cur[i], &theta));
                    if i + 1 < order {
                        next[i + 1] = k.add(&next[i + 1], &cur[i]);
                    }
                }
                cur = next;
                tpow.push(cur.clone());
            }
        }
        Expansion {
            k: k.clone(),
            inf,
            order,
            tpow,
        }
    }

    /// s^{deg−j} t^j as a series in u.
    pub fn monomial(&self, deg: usize, j: usize) -> Vec<ResElem> {
        if self.inf {
            let mut v = vec![self.k.zero(); self.order];
            if deg - j < self.order {
                v[deg - j] = self.k.one();
            }
            v
        } else {
            self.tpow[j].clone()
        }
    }

    pub fn form(&self, coeffs: &[FieldElem]) -> Vec<ResElem> {
        let deg = coeffs.len() - 1;
        let mut v = vec![self.k.zero(); self.order];
        for (j, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = self.monomial(deg, j);
            for (x, y) in v.iter_mut().zip(&m) {
                *x = self.k.add(x, &self.k.scale(y, c));
            }
        }
        v
    }
}

/// Formal parametrization of X near a split line E: w0 = ξ, w1 = y(ξ, u), w2 = 1,
/// where (w0, w1, w2) are the fiber coordinates with w0 the vanishing one.
#[derive(Clone, Debug)]
pub struct LineChart {
    exp: Expansion,
    idx: [usize; 3],
    order: usize,
    ypow: Vec<Series>,
}

impl LineChart {
    pub fn new(
        bundle: &ConicBundle,
        fiber: &SingularFiber,
        side: Side,
        order: usize,
        dmax: usize,
        amax: usize,
    ) -> Self {
        let k = &fiber.residue;
        let exp = Expansion::new(k, &fiber.point, order, amax.max(bundle.l()));
        let idx = fiber.coordinates();
        let rho = fiber
            .slope(side == Side::EPrime)
            .expect("line charts exist only on split fibers");
        let forms = bundle.forms();
        let a: Vec<Vec<ResElem>> = idx.iter().map(|&i| exp.form(forms[i].coeffs())).collect();
        let denom = k
            .inv(&k.mul(&k.from_base(bundle.field().from_int(2)), &k.mul(&a[1][0], &rho)))
            .expect("βρ ≠ 0 on a split fiber");
        let mut y: Series = vec![vec![rho]];
        for j in 1..order {
            let mut num: XiPoly = vec![a[2][j].clone(), k.zero(), a[0][j].clone()];
            for i in 0..=j {
                for kk in 0..=j - i {
                    let m = j - i - kk;
                    if kk == j || m == j {
                        continue;
                    }
                    let p = xscale(k, &xmul(k, &y[kk], &y[m]), &a[1][i]);
                    num = xadd(k, &num, &p);
                }
            }
            let yj = xscale(k, &num, &k.neg(&denom));
            y.push(yj);
        }
        let mut one: Series = vec![Vec::new(); order];
        if order > 0 {
            one[0] = vec![k.one()];
        }
        let mut ypow = vec![one];
        for n in 1..=dmax {
            let next = smul(k, &ypow[n - 1], &y, order);
            ypow.push(next);
        }
        LineChart {
            exp,
            idx,
            order,
            ypow,
        }
    }

    fn coord_series(&self, amb: &Ambient, coord: usize) -> Series {
        let k = &self.exp.k;
        let (mi, j) = amb.split(coord);
        let e = amb.monos[mi];
        let (e0, e1) = (e[self.idx[0]] as usize, e[self.idx[1]] as usize);
        let tser = self.exp.monomial(amb.tdeg(), j);
        let base = &self.ypow[e1];
        let mut out: Series = vec![Vec::new(); self.order];
        for (i, c) in tser.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            for (o, x) in base.iter().enumerate().take(self.order - i) {
                if x.is_empty() {
                    continue;
                }
                let mut shifted = vec![k.zero(); e0];
                shifted.extend(xscale(k, x, c));
                out[i + o] = xadd(k, &out[i + o], &shifted);
            }
        }
        out
    }

    fn width_at(amb: &Ambient, o: usize) -> usize {
        amb.dprime + 2 * o + 1
    }

    /// Linear forms on ambient coordinates: the u^o coefficients of the series,
    /// one row per (ξ-power, base coordinate), for o in `orders`.
    pub fn rows(&self, amb: &Ambient, orders: std::ops::Range<usize>) -> Vec<Vec<FieldElem>> {
        let n = amb.width();
        let m = self.exp.k.degree();
        let series: Vec<Series> = (0..n).map(|c| self.coord_series(amb, c)).collect();
        let mut rows = Vec::new();
        for o in orders {
            assert!(o < self.order, "series order too small");
            for p in 0..Self::width_at(amb, o) {
                for b in 0..m {
                    let row: Vec<FieldElem> = series
                        .iter()
                        .map(|s| s[o].get(p).map_or(FieldElem::ZERO, |x| x[b]))
                        .collect();
                    rows.push(row);
                }
            }
        }
        rows
    }

    /// Order of vanishing of an ambient vector along the line, if below the chart order.
    pub fn valuation(&self, amb: &Ambient, v: &[FieldElem]) -> Option<usize> {
        let k = &self.exp.k;
        let mut total: Series = vec![Vec::new(); self.order];
        for (c, &x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let s = self.coord_series(amb, c);
            for (t, y) in total.iter_mut().zip(&s) {
                let scaled: XiPoly = y.iter().map(|r| k.scale(r, x)).collect();
                *t = xadd(k, t, &scaled);
            }
        }
        total
            .iter()
            .position(|x| x.iter().any(|r| !k.is_zero(r)))
    }
}

/// Normal forms of degree-d′ forms over κ(P) modulo the fiber conic Q(θ).
#[derive(Clone, Debug)]
pub struct FiberNf {
    exp: Expansion,
    reduced: Vec<[u32; 3]>,
    table: Vec<Vec<ResElem>>,
}

impl FiberNf {
    pub fn new(bundle: &ConicBundle, point: &ClosedPoint, dprime: usize, amax: usize) -> Self {
        let k = point.residue_field(bundle.field());
        let vals = bundle.values_at(point, &k);
        let lead = (0..3)
            .find(|&i| !k.is_zero(&vals[i]))
            .expect("a fiber conic is nonzero");
        let all = monomials(dprime);
        let reduced: Vec<[u32; 3]> = all.iter().copied().filter(|e| e[lead] <= 1).collect();
        let pos: HashMap<[u32; 3], usize> =
            reduced.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let inv_lead = k.inv(&vals[lead]).expect("nonzero");
        let ratios: Vec<ResElem> = (0..3).map(|c| k.neg(&k.mul(&vals[c], &inv_lead))).collect();
        let mut memo: HashMap<[u32; 3], Vec<ResElem>> = HashMap::new();
        fn nf(
            e: [u32; 3],
            lead: usize,
            k: &ResidueField,
            ratios: &[ResElem],
            pos: &HashMap<[u32; 3], usize>,
            memo: &mut HashMap<[u32; 3], Vec<ResElem>>,
        ) -> Vec<ResElem> {
            if let Some(v) = memo.get(&e) {
                return v.clone();
            }
            let mut out = vec![k.zero(); pos.len()];
            if e[lead] <= 1 {
                out[pos[&e]] = k.one();
            } else {
                for c in (0..3).filter(|&c| c != lead) {
                    if k.is_zero(&ratios[c]) {
                        continue;
                    }
                    let mut e2 = e;
                    e2[lead] -= 2;
                    e2[c] += 2;
                    let sub = nf(e2, lead, k, ratios, pos, memo);
                    for (o, s) in out.iter_mut().zip(&sub) {
                        *o = k.add(o, &k.mul(s, &ratios[c]));
                    }
                }
            }
            memo.insert(e, out.clone());
            out
        }
        let table = all
            .iter()
            .map(|&e| nf(e, lead, &k, &ratios, &pos, &mut memo))
            .collect();
        debug_assert!(all.iter().enumerate().all(|(i, &e)| mono_index(e) == i));
        FiberNf {
            exp: Expansion::new(&k, point, 1, amax),
            reduced,
            table,
        }
    }

    /// Rows whose common kernel is the set of ambient vectors vanishing on the fiber.
    pub fn rows(&self, amb: &Ambient) -> Vec<Vec<FieldElem>> {
        let k = &self.exp.k;
        let m = k.degree();
        let n = amb.width();
        let vals: Vec<ResElem> = (0..=amb.tdeg())
            .map(|j| self.exp.monomial(amb.tdeg(), j)[0].clone())
            .collect();
        let mut rows = vec![vec![FieldElem::ZERO; n]; self.reduced.len() * m];
        for c in 0..n {
            let (mi, j) = amb.split(c);
            for (r, coeff) in self.table[mi].iter().enumerate() {
                let v = k.mul(coeff, &vals[j]);
                for b in 0..m {
                    rows[r * m + b][c] = v[b];
                }
            }
        }
        rows
    }
}
