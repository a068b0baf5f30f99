//! Bundles with l = 0 are P¹ × P¹ after parametrizing the constant conic;
//! divisors are bihomogeneous forms of bidegree (d, a) in (u, v; s, t),
//! which also covers odd fiber degree.

use super::count::{check_budget, qpow, scan_marked, sieve_count, Condition, ScanOptions};
use super::local::Expansion;
use crate::curve::closed_points_up_to;
use crate::error::Result;
use crate::exec::{self, AtomicBitset};
use crate::gf::linalg::nullspace;
use crate::gf::{FieldDesc, FieldElem};

/// Coordinate of u^{d−i} v^i s^{a−j} t^j is i·(a+1) + j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bidegree {
    pub d: usize,
    pub a: usize,
}

impl Bidegree {
    pub fn dim(&self) -> usize {
        (self.d + 1) * (self.a + 1)
    }
}

/// Rows expressing divisibility by p_P for every closed point with deg P ≤ a.
pub fn vertical_conditions(f: &std::sync::Arc<FieldDesc>, bd: Bidegree) -> Vec<Condition> {
    let mut out = Vec::new();
    for p in closed_points_up_to(f, bd.a) {
        let k = p.residue_field(f);
        let m = k.degree();
        let exp = Expansion::new(&k, &p, 1, bd.a);
        let vals: Vec<_> = (0..=bd.a).map(|j| exp.monomial(bd.a, j)[0].clone()).collect();
        let mut rows = Vec::new();
        for i in 0..=bd.d {
            for b in 0..m {
                let mut r = vec![FieldElem::ZERO; bd.dim()];
                for (j, v) in vals.iter().enumerate() {
                    r[i * (bd.a + 1) + j] = v[b];
                }
                rows.push(r);
            }
        }
        out.push(Condition {
            rows,
            height: 2 * p.degree() as i64,
        });
    }
    out
}

/// Bitset of forms divisible by some p_P.
pub fn vertical_marked(
    f: &std::sync::Arc<FieldDesc>,
    bd: Bidegree,
    opts: &ScanOptions,
) -> Result<AtomicBitset> {
    let conds = vertical_conditions(f, bd);
    let kernels: Vec<_> = conds
        .iter()
        .map(|c| nullspace(&c.rows, bd.dim(), f))
        .collect();
    scan_marked(f, bd.dim(), &kernels, opts)
}

pub fn fiberfree_sieve(
    f: &std::sync::Arc<FieldDesc>,
    bd: Bidegree,
    opts: &ScanOptions,
) -> Result<num_bigint::BigInt> {
    let conds = vertical_conditions(f, bd);
    sieve_count(f, bd.dim(), &conds, 2 * bd.a as i64, opts)
}

fn decode(q: u64, mut idx: u64, n: usize) -> Vec<FieldElem> {
    (0..n)
        .map(|_| {
            let c = FieldElem((idx % q) as u32);
            idx /= q;
            c
        })
        .collect()
}

/// Leading (highest-index) nonzero coordinate equals 1.
pub fn is_normalized(c: &[FieldElem]) -> bool {
    c.iter().rev().find(|x| !x.is_zero()) == Some(&FieldElem::ONE)
}

/// Normalized fiber-free forms of a bidegree, in index order.
pub fn fiberfree_reps(
    f: &std::sync::Arc<FieldDesc>,
    bd: Bidegree,
    opts: &ScanOptions,
) -> Result<Vec<Vec<FieldElem>>> {
    let bits = vertical_marked(f, bd, opts)?;
    let q = f.q() as u64;
    let mut out = Vec::new();
    for i in 0..bits.len() {
        if !bits.get(i) {
            let c = decode(q, i, bd.dim());
            if is_normalized(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

pub fn multiply(f: &FieldDesc, b1: Bidegree, g1: &[FieldElem], b2: Bidegree, g2: &[FieldElem]) -> Vec<FieldElem> {
    let a = b1.a + b2.a;
    let mut out = vec![FieldElem::ZERO; (b1.d + b2.d + 1) * (a + 1)];
    for (c1, &x) in g1.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (i1, j1) = (c1 / (b1.a + 1), c1 % (b1.a + 1));
        for (c2, &y) in g2.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let (i2, j2) = (c2 / (b2.a + 1), c2 % (b2.a + 1));
            let k = (i1 + i2) * (a + 1) + j1 + j2;
            out[k] = f.add(out[k], f.mul(x, y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidegreeCount {
    pub dim: usize,
    pub fiberfree: u128,
    pub fiberfree_sieve: u128,
    pub composite: u128,
    pub prime: u128,
}

/// Fiber-free and prime counts in bidegree (d, a), with composites marked by
/// multiplying fiber-free members of every splitting (d1, a1) + (d2, a2).
pub fn prime_count_bidegree(
    f: &std::sync::Arc<FieldDesc>,
    bd: Bidegree,
    opts: &ScanOptions,
) -> Result<BidegreeCount> {
    let q = f.q() as u64;
    let dim = bd.dim();
    let bits = vertical_marked(f, bd, opts)?;
    let vertical = bits.count_ones(opts.exec) as u128;
    let fiberfree = (bits.len() as u128 - vertical) / (q as u128 - 1);
    let sieve = super::count::to_u128(&fiberfree_sieve(f, bd, opts)?);
    let mut parts = Vec::new();
    for d1 in 1..=bd.d / 2 {
        let d2 = bd.d - d1;
        for a1 in 0..=bd.a {
            let a2 = bd.a - a1;
            if d1 == d2 && a1 > a2 {
                continue;
            }
            parts.push((Bidegree { d: d1, a: a1 }, Bidegree { d: d2, a: a2 }));
        }
    }
    let mut work: u128 = qpow(q, dim);
    for (p1, p2) in &parts {
        work += qpow(q, p1.dim()) + qpow(q, p2.dim());
    }
    check_budget(work, opts.budget)?;
    let qpows: Vec<u64> = (0..dim).map(|i| q.pow(i as u32)).collect();
    let scalars: Vec<FieldElem> = f.elements().filter(|x| !x.is_zero()).collect();
    for (p1, p2) in parts {
        let r1 = fiberfree_reps(f, p1, opts)?;
        let r2 = fiberfree_reps(f, p2, opts)?;
        check_budget((r1.len() * r2.len()) as u128, opts.budget)?;
        exec::for_each(opts.exec, r1.len(), |i| {
            for g2 in &r2 {
                let g = multiply(f, p1, &r1[i], p2, g2);
                for &lam in &scalars {
                    let idx = g
                        .iter()
                        .zip(&qpows)
                        .map(|(x, w)| f.mul(*x, lam).0 as u64 * w)
                        .sum();
                    bits.set(idx);
                }
            }
        });
    }
    let marked = bits.count_ones(opts.exec) as u128;
    let prime = (bits.len() as u128 - marked) / (q as u128 - 1);
    Ok(BidegreeCount {
        dim,
        fiberfree,
        fiberfree_sieve: sieve,
        composite: fiberfree - prime,
        prime,
    })
}
