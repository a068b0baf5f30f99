//! Counting sections outside a family of subspaces: a direct bitset scan and
//! the inclusion–exclusion sum over component sets.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::{self, AtomicBitset, Exec};
use crate::gf::linalg::nullspace;
use crate::gf::{FieldDesc, FieldElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    /// Maximum number of section-scan steps.
    pub budget: u64,
    pub exec: Exec,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: 100_000_000,
            exec: Exec::default(),
        }
    }
}

/// One vanishing condition: rows over section coordinates and the height it uses.
#[derive(Clone, Debug)]
pub struct Condition {
    pub rows: Vec<Vec<FieldElem>>,
    pub height: i64,
}

pub fn qpow(q: u64, k: usize) -> u128 {
    (q as u128).saturating_pow(k as u32)
}

/// Index Σ c_i q^i of a coordinate vector.
pub fn index_of(q: u64, c: &[FieldElem]) -> u64 {
    c.iter().rev().fold(0u64, |acc, x| acc * q + x.0 as u64)
}

pub fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::EnumerationBudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Mark every vector of span(basis) in a bitset indexed by `index_of`.
pub fn mark_span(f: &FieldDesc, dim: usize, basis: &[Vec<FieldElem>], bits: &AtomicBitset, exec: Exec) {
    let q = f.q() as u64;
    let p = f.p() as usize;
    let n = f.n() as usize;
    let qpows: Vec<u64> = (0..dim).map(|i| q.pow(i as u32)).collect();
    // F_p-generators α_j·K_i, stored sparsely
    let mut gens: Vec<Vec<(usize, FieldElem)>> = Vec::new();
    for k in basis {
        for j in 0..n {
            let alpha = FieldElem((p as u32).pow(j as u32));
            gens.push(
                k.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, &x)| (i, f.mul(alpha, x)))
                    .collect(),
            );
        }
    }
    let g = gens.len();
    let mut top = 0;
    while top < g && p.pow(top as u32) < 256 {
        top += 1;
    }
    let low = g - top;
    let chunks = p.pow(top as u32);
    let add = |v: &mut [FieldElem], idx: &mut u64, gen: &[(usize, FieldElem)]| {
        for &(i, x) in gen {
            let old = v[i];
            let new = f.add(old, x);
            v[i] = new;
            *idx = idx
                .wrapping_add((new.0 as u64).wrapping_mul(qpows[i]))
                .wrapping_sub((old.0 as u64).wrapping_mul(qpows[i]));
        }
    };
    exec::for_each(exec, chunks, |chunk| {
        let mut v = vec![FieldElem::ZERO; dim];
        let mut idx = 0u64;
        let mut c = chunk;
        for t in 0..top {
            for _ in 0..c % p {
                add(&mut v, &mut idx, &gens[low + t]);
            }
            c /= p;
        }
        let mut digits = vec![0usize; low];
        loop {
            bits.set(idx);
            let mut t = 0;
            loop {
                if t == low {
                    return;
                }
                add(&mut v, &mut idx, &gens[t]);
                digits[t] += 1;
                if digits[t] < p {
                    break;
                }
                digits[t] = 0;
                t += 1;
            }
        }
    });
}

/// Bitset of the vectors lying in at least one kernel (the zero vector included).
pub fn scan_marked(
    f: &FieldDesc,
    dim: usize,
    kernels: &[Vec<Vec<FieldElem>>],
    opts: &ScanOptions,
) -> Result<AtomicBitset> {
    let q = f.q() as u64;
    let total = qpow(q, dim);
    let needed = total + kernels.iter().map(|k| qpow(q, k.len())).sum::<u128>();
    check_budget(needed, opts.budget)?;
    let bits = AtomicBitset::new(total as u64);
    bits.set(0);
    for k in kernels {
        if !k.is_empty() {
            mark_span(f, dim, k, &bits, opts.exec);
        }
    }
    Ok(bits)
}

/// Number of nonzero vectors outside every kernel, divided by q − 1.
pub fn scan_count(
    f: &FieldDesc,
    dim: usize,
    kernels: &[Vec<Vec<FieldElem>>],
    opts: &ScanOptions,
) -> Result<u128> {
    let bits = scan_marked(f, dim, kernels, opts)?;
    let unmarked = bits.len() as u128 - bits.count_ones(opts.exec) as u128;
    Ok(unmarked / (f.q() as u128 - 1))
}

/// Σ_S (−1)^{|S|} (q^{k_S} − 1) / (q − 1) over sets S of conditions with
/// total height ≤ max_height. Branches whose kernel is zero are pruned.
pub fn sieve_count(
    f: &FieldDesc,
    dim: usize,
    conds: &[Condition],
    max_height: i64,
    opts: &ScanOptions,
) -> Result<BigInt> {
    let q = f.q() as u64;
    let identity: Vec<Vec<FieldElem>> = (0..dim)
        .map(|i| {
            let mut v = vec![FieldElem::ZERO; dim];
            v[i] = FieldElem::ONE;
            v
        })
        .collect();
    let term = |k: usize| BigInt::from(q).pow(k as u32) - 1;
    let restrict = |basis: &[Vec<FieldElem>], c: &Condition| -> Vec<Vec<FieldElem>> {
        let m: Vec<Vec<FieldElem>> = c
            .rows
            .iter()
            .map(|r| {
                basis
                    .iter()
                    .map(|b| {
                        r.iter().zip(b).fold(FieldElem::ZERO, |acc, (&x, &y)| {
                            f.add(acc, f.mul(x, y))
                        })
                    })
                    .collect()
            })
            .collect();
        let lam = nullspace(&m, basis.len(), f);
        lam.iter()
            .map(|l| {
                let mut v = vec![FieldElem::ZERO; dim];
                for (&c, b) in l.iter().zip(basis) {
                    crate::gf::linalg::axpy(&mut v, c, b, f);
                }
                v
            })
            .collect()
    };
    struct Walk<'a, R: Fn(&[Vec<FieldElem>], &Condition) -> Vec<Vec<FieldElem>>> {
        conds: &'a [Condition],
        max_height: i64,
        restrict: R,
        steps: u128,
        budget: u64,
    }
    fn dfs<R: Fn(&[Vec<FieldElem>], &Condition) -> Vec<Vec<FieldElem>>>(
        w: &mut Walk<'_, R>,
        start: usize,
        basis: &[Vec<FieldElem>],
        used: i64,
        negative: bool,
        acc: &mut Vec<(bool, usize)>,
    ) -> Result<()> {
        for j in start..w.conds.len() {
            let h = used + w.conds[j].height;
            if h > w.max_height {
                continue;
            }
            w.steps += 1;
            check_budget(w.steps, w.budget)?;
            let next = (w.restrict)(basis, &w.conds[j]);
            if next.is_empty() {
                continue;
            }
            acc.push((!negative, next.len()));
            dfs(w, j + 1, &next, h, !negative, acc)?;
        }
        Ok(())
    }
    let mut walk = Walk {
        conds,
        max_height,
        restrict,
        steps: 0,
        budget: opts.budget,
    };
    let mut terms = vec![(false, dim)];
    dfs(&mut walk, 0, &identity, 0, false, &mut terms)?;
    let mut total = BigInt::zero();
    for (neg, k) in terms {
        if neg {
            total -= term(k);
        } else {
            total += term(k);
        }
    }
    let qm1 = BigInt::from(q - 1);
    debug_assert!((&total % &qm1).is_zero());
    Ok(total / qm1)
}

pub fn to_u128(x: &BigInt) -> u128 {
    x.to_u128().expect("nonnegative count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn span_marking_counts_subspace() {
        for (p, n) in [(3, 1), (3, 2), (5, 1)] {
            let f = make_field(p, n).unwrap();
            let q = f.q() as u64;
            let dim = 4;
            let k = vec![
                vec![FieldElem(1), FieldElem(2), FieldElem(0), FieldElem(1)],
                vec![FieldElem(0), FieldElem(1), FieldElem(1), FieldElem(0)],
            ];
            let bits = AtomicBitset::new(q.pow(dim as u32));
            mark_span(&f, dim, &k, &bits, Exec::Sequential);
            assert_eq!(bits.count_ones(Exec::Sequential), q * q);
            let c = vec![FieldElem(1), FieldElem(1)];
            let mut v = vec![FieldElem::ZERO; dim];
            for (x, b) in c.iter().zip(&k) {
                crate::gf::linalg::axpy(&mut v, *x, b, &f);
            }
            assert!(bits.get(index_of(q, &v)));
        }
    }

    #[test]
    fn sieve_matches_scan_on_coordinate_hyperplanes() {
        let f = make_field(3, 1).unwrap();
        let dim = 3;
        let conds: Vec<Condition> = (0..dim)
            .map(|i| {
                let mut r = vec![FieldElem::ZERO; dim];
                r[i] = FieldElem::ONE;
                Condition { rows: vec![r], height: 1 }
            })
            .collect();
        let kernels: Vec<_> = conds
            .iter()
            .map(|c| nullspace(&c.rows, dim, &f))
            .collect();
        let opts = ScanOptions::default();
        let scan = scan_count(&f, dim, &kernels, &opts).unwrap();
        let sieve = sieve_count(&f, dim, &conds, 10, &opts).unwrap();
        // vectors with all coordinates nonzero: 2^3, projectively 4
        assert_eq!(scan, 4);
        assert_eq!(to_u128(&sieve), 4);
    }
}
