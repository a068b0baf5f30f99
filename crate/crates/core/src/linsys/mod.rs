//! Section spaces H⁰(X, O(D)) as explicit F_q-vector spaces, and the exhaustive
//! counts M_f(D) and M(d, e) built on them.

pub mod ambient;
pub mod bidegree;
pub mod count;
mod local;
mod space;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

pub use count::ScanOptions;
pub use space::{
    component_multiplicity, components_up_to, proportion_exact, proportion_product,
    section_space, Component, ComponentSet, FiberPart, Section, SectionSpace,
};

use crate::bundle::{BinaryForm, ConicBundle};
use crate::curve::CurveDescriptor;
use crate::error::{Error, Result};
use crate::exec::AtomicBitset;
use crate::gf::{is_square_poly, linalg::rref, FieldElem};
use crate::picard::{classes_of_type, decompositions, euler_char, type_of, NumClass};
use ambient::{multiply, multiply_binary, Ambient};
use bidegree::{is_normalized, Bidegree};
use count::{check_budget, index_of, qpow, scan_marked, sieve_count, Condition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberFreeCount {
    pub dim: usize,
    pub scan: u128,
    pub sieve: u128,
}

fn conditions(space: &SectionSpace) -> Result<Vec<Condition>> {
    let e = type_of(space.bundle(), space.class())?.e;
    components_up_to(space.bundle(), e)
        .into_iter()
        .map(|c| {
            Ok(Condition {
                rows: space.section_rows(&c)?,
                height: c.height(),
            })
        })
        .collect()
}

fn kernels(space: &SectionSpace, conds: &[Condition]) -> Vec<Vec<Vec<FieldElem>>> {
    conds
        .iter()
        .map(|c| crate::gf::linalg::nullspace(&c.rows, space.dim(), space.field()))
        .collect()
}

/// Bitset over section indices marking every section that vanishes on some component.
fn fiber_marked(space: &SectionSpace, opts: &ScanOptions) -> Result<AtomicBitset> {
    let conds = conditions(space)?;
    scan_marked(space.field(), space.dim(), &kernels(space, &conds), opts)
}

/// M_f(D) by direct scan and by inclusion–exclusion; the two must agree.
pub fn fiberfree_count(space: &SectionSpace, opts: &ScanOptions) -> Result<FiberFreeCount> {
    let dim = space.dim();
    if dim == 0 {
        return Ok(FiberFreeCount { dim, scan: 0, sieve: 0 });
    }
    let f = space.field();
    let q = f.q() as u128;
    let conds = conditions(space)?;
    let bits = scan_marked(f, dim, &kernels(space, &conds), opts)?;
    let scan = (bits.len() as u128 - bits.count_ones(opts.exec) as u128) / (q - 1);
    let e = type_of(space.bundle(), space.class())?.e;
    let sieve = count::to_u128(&sieve_count(f, dim, &conds, e, opts)?);
    if scan != sieve {
        return Err(Error::CrossCheck(format!(
            "fiber-free scan {scan} differs from inclusion-exclusion {sieve}"
        )));
    }
    Ok(FiberFreeCount { dim, scan, sieve })
}

/// Direct fiber-free test of one section through component multiplicities.
pub fn is_fiberfree(space: &SectionSpace, s: &Section) -> Result<bool> {
    let e = type_of(space.bundle(), space.class())?.e;
    for c in components_up_to(space.bundle(), e) {
        let m = match &c {
            Component::Fiber(p) => component_multiplicity(space, s, p, FiberPart::FullFiber)?,
            Component::Line(p, side) => {
                let part = match side {
                    crate::picard::Side::E => FiberPart::E,
                    crate::picard::Side::EPrime => FiberPart::EPrime,
                };
                component_multiplicity(space, s, p, part)?
            }
        };
        if m > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassCount {
    pub class: serde_json::Value,
    pub dim: usize,
    pub fiberfree: u128,
    pub composite: u128,
    pub prime: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeCount {
    pub d: i64,
    pub e: i64,
    pub model: &'static str,
    pub fiberfree: u128,
    pub prime: u128,
    pub classes: Vec<ClassCount>,
}

/// −(bc α² + ac β² + ab γ²) for a section α x + β y + γ z.
fn discriminant(bundle: &ConicBundle, amb: &Ambient, v: &[FieldElem]) -> BinaryForm {
    let f = bundle.field();
    let w = amb.tdeg() + 1;
    let coeff = |i: usize| BinaryForm::new(v[i * w..(i + 1) * w].to_vec());
    let [a, b, c] = bundle.forms();
    let terms = [
        b.mul(c, f).mul(&coeff(0).mul(&coeff(0), f), f),
        a.mul(c, f).mul(&coeff(1).mul(&coeff(1), f), f),
        a.mul(b, f).mul(&coeff(2).mul(&coeff(2), f), f),
    ];
    let sum: Vec<FieldElem> = (0..terms[0].coeffs().len())
        .map(|i| {
            let s = terms.iter().fold(FieldElem::ZERO, |acc, t| f.add(acc, t.coeffs()[i]));
            f.neg(s)
        })
        .collect();
    BinaryForm::new(sum)
}

fn is_square_form(bundle: &ConicBundle, g: &BinaryForm) -> bool {
    if g.is_zero() {
        return true;
    }
    let h = g.dehomogenize();
    let at_inf = g.degree() - h.degree().unwrap_or(0);
    at_inf % 2 == 0 && is_square_poly(bundle.field(), &h)
}

/// Normalized fiber-free sections of a class, as ambient vectors.
fn fiberfree_members(space: &SectionSpace, opts: &ScanOptions) -> Result<Vec<Vec<FieldElem>>> {
    if space.dim() == 0 {
        return Ok(Vec::new());
    }
    let bits = fiber_marked(space, opts)?;
    let mut out = Vec::new();
    for i in 0..bits.len() {
        if !bits.get(i) {
            let c = space.coords_of_index(i);
            if is_normalized(&c) {
                out.push(space.combine(&c));
            }
        }
    }
    Ok(out)
}

/// Solves p^K·s ≡ w modulo conic multiples for s ∈ H⁰(D).
struct ProductSolver {
    big: Ambient,
    conic: crate::gf::linalg::Echelon,
    aug: crate::gf::linalg::Echelon,
    dim: usize,
}

impl ProductSolver {
    fn new(space: &SectionSpace, twist: &[FieldElem]) -> Self {
        let f = space.field();
        let amb = space.ambient();
        let big = Ambient::new(amb.dprime, amb.coef + twist.len() as i64 - 1);
        let conic = ambient::conic_multiples(space.bundle(), &big);
        let dim = space.dim();
        let n = big.width();
        let rows = space
            .basis_vectors()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let (_, mut w) = multiply_binary(f, amb, b, twist);
                conic.reduce(&mut w, f);
                w.resize(n + dim, FieldElem::ZERO);
                w[n + i] = FieldElem::ONE;
                w
            })
            .collect();
        let aug = rref(rows, n + dim, f);
        ProductSolver { big, conic, aug, dim }
    }

    fn solve(&self, f: &crate::gf::FieldDesc, w: &[FieldElem]) -> Option<Vec<FieldElem>> {
        let n = self.big.width();
        let mut v = w.to_vec();
        self.conic.reduce(&mut v, f);
        v.resize(n + self.dim, FieldElem::ZERO);
        self.aug.reduce(&mut v, f);
        if v[..n].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(v[n..].iter().map(|&x| f.neg(x)).collect())
    }
}

/// Mark, in `bits`, every product s1·s2 with s_i fiber-free in |D_i|.
fn mark_products(
    space: &SectionSpace,
    d1: &NumClass,
    d2: &NumClass,
    bits: &AtomicBitset,
    opts: &ScanOptions,
) -> Result<()> {
    let bundle = space.bundle();
    let f = bundle.field();
    let q = f.q() as u64;
    let s1 = section_space(bundle, d1)?;
    let s2 = section_space(bundle, d2)?;
    if s1.dim() == 0 || s2.dim() == 0 {
        return Ok(());
    }
    let r1 = fiberfree_members(&s1, opts)?;
    let r2 = fiberfree_members(&s2, opts)?;
    check_budget((r1.len() * r2.len()) as u128, opts.budget)?;
    let (_, b) = space.class().canonical();
    let (_, b1) = s1.class().canonical();
    let (_, b2) = s2.class().canonical();
    let mut twist = vec![FieldElem::ONE];
    for sf in bundle.split_fibers() {
        let p = &sf.point;
        let g = |m: &std::collections::BTreeMap<_, i64>| m.get(p).copied().unwrap_or(0).max(0);
        let k = g(&b1) + g(&b2) - g(&b);
        for _ in 0..k {
            twist = BinaryForm::new(twist)
                .mul(&BinaryForm::new(p.homogeneous()), f)
                .coeffs()
                .to_vec();
        }
    }
    let solver = ProductSolver::new(space, &twist);
    let scalars: Vec<FieldElem> = f.elements().filter(|x| !x.is_zero()).collect();
    let failures = AtomicU64::new(0);
    crate::exec::for_each(opts.exec, r1.len(), |i| {
        for v2 in &r2 {
            let (_, w) = multiply(f, s1.ambient(), &r1[i], s2.ambient(), v2);
            match solver.solve(f, &w) {
                Some(c) => {
                    for &lam in &scalars {
                        let scaled: Vec<FieldElem> = c.iter().map(|&x| f.mul(x, lam)).collect();
                        bits.set(index_of(q, &scaled));
                    }
                }
                None => {
                    failures.fetch_add(1, Ordering::Relaxed);
                }
            }
        }
    });
    if failures.into_inner() > 0 {
        return Err(Error::CrossCheck("a product left H⁰(D)".into()));
    }
    Ok(())
}

/// M(d, e): fiber-free members of every class of type (d, e) that are not sums of
/// two nonzero effective divisors.
pub fn prime_count(bundle: &ConicBundle, d: i64, e: i64, opts: &ScanOptions) -> Result<PrimeCount> {
    if bundle.l() == 0 {
        return prime_count_l0(bundle, d, e, opts);
    }
    prime_count_ambient(bundle, d, e, opts)
}

/// The ambient-model route; on l = 0 bundles it serves as a cross-check.
pub fn prime_count_ambient(
    bundle: &ConicBundle,
    d: i64,
    e: i64,
    opts: &ScanOptions,
) -> Result<PrimeCount> {
    if d % 2 != 0 {
        return Err(Error::OddDegreeUnsupported(d));
    }
    let trivial = bundle.has_trivial_generic_fiber();
    if trivial && d > 2 && bundle.l() > 0 {
        return Err(Error::Unsupported(format!(
            "d = {d} on a bundle with trivial generic fiber and l > 0 needs odd-degree parts"
        )));
    }
    let f = bundle.field();
    let q = f.q() as u128;
    let mut classes = Vec::new();
    for class in classes_of_type(bundle, d, e) {
        let space = section_space(bundle, &class)?;
        let dim = space.dim();
        if dim == 0 {
            classes.push(ClassCount {
                class: class.to_json(),
                dim,
                fiberfree: 0,
                composite: 0,
                prime: 0,
            });
            continue;
        }
        let bits = fiber_marked(&space, opts)?;
        let fiberfree = (bits.len() as u128 - bits.count_ones(opts.exec) as u128) / (q - 1);
        let composite = if d == 2 {
            if trivial {
                let count = AtomicU64::new(0);
                let amb = space.ambient().clone();
                bits.for_each_clear(opts.exec, |i| {
                    let c = space.coords_of_index(i);
                    if is_normalized(&c) {
                        let v = space.combine(&c);
                        if is_square_form(bundle, &discriminant(bundle, &amb, &v)) {
                            count.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                });
                count.into_inner() as u128
            } else {
                0
            }
        } else {
            for (d1, d2) in decompositions(bundle, &class) {
                if d1.d == 0 || d2.d == 0 {
                    continue;
                }
                mark_products(&space, &d1, &d2, &bits, opts)?;
            }
            let after = (bits.len() as u128 - bits.count_ones(opts.exec) as u128) / (q - 1);
            fiberfree - after
        };
        classes.push(ClassCount {
            class: class.to_json(),
            dim,
            fiberfree,
            composite,
            prime: fiberfree - composite,
        });
    }
    Ok(PrimeCount {
        d,
        e,
        model: "ambient",
        fiberfree: classes.iter().map(|c| c.fiberfree).sum(),
        prime: classes.iter().map(|c| c.prime).sum(),
        classes,
    })
}

fn prime_count_l0(bundle: &ConicBundle, d: i64, e: i64, opts: &ScanOptions) -> Result<PrimeCount> {
    if d < 0 {
        return Err(Error::EmptySpace(format!("fiber degree {d} is negative")));
    }
    let mut classes = Vec::new();
    if e >= 0 && e % 2 == 0 {
        let bd = Bidegree {
            d: d as usize,
            a: (e / 2) as usize,
        };
        let c = bidegree::prime_count_bidegree(bundle.field(), bd, opts)?;
        if c.fiberfree != c.fiberfree_sieve {
            return Err(Error::CrossCheck(format!(
                "fiber-free scan {} differs from inclusion-exclusion {}",
                c.fiberfree, c.fiberfree_sieve
            )));
        }
        classes.push(ClassCount {
            class: NumClass::with_fiber_degree(d, e / 2).to_json(),
            dim: c.dim,
            fiberfree: c.fiberfree,
            composite: c.composite,
            prime: c.prime,
        });
    }
    Ok(PrimeCount {
        d,
        e,
        model: "bidegree",
        fiberfree: classes.iter().map(|c| c.fiberfree).sum(),
        prime: classes.iter().map(|c| c.prime).sum(),
        classes,
    })
}

/// Sum of M_f over the classes of type (d, e).
pub fn fiberfree_total(bundle: &ConicBundle, d: i64, e: i64, opts: &ScanOptions) -> Result<u128> {
    let mut total = 0;
    for class in classes_of_type(bundle, d, e) {
        let space = section_space(bundle, &class)?;
        total += fiberfree_count(&space, opts)?.scan;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimRecord {
    pub class: serde_json::Value,
    pub e: i64,
    pub dim: usize,
    pub chi: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityFailure {
    pub class: serde_json::Value,
    pub e: i64,
    pub components: Vec<String>,
    pub height: i64,
    pub rank: i64,
    pub target: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Threshold {
    pub d: i64,
    pub e_min: i64,
    pub e_max: i64,
    pub n_emp: i64,
    pub dims: Vec<DimRecord>,
    pub surjectivity_failures: Vec<SurjectivityFailure>,
}

/// Component sets with at most two elements and height ≤ h.
pub fn small_component_sets(bundle: &ConicBundle, h: i64) -> Vec<ComponentSet> {
    let comps = components_up_to(bundle, h);
    let mut out = vec![ComponentSet::default()];
    for (i, c) in comps.iter().enumerate() {
        if c.height() <= h {
            out.push(ComponentSet::new([c.clone()]));
        }
        for c2 in &comps[i + 1..] {
            if c.height() + c2.height() <= h {
                out.push(ComponentSet::new([c.clone(), c2.clone()]));
            }
        }
    }
    out
}

/// Scan e over [e_min, e_max]: compare dim H⁰ with χ for every class, and the
/// restriction rank with its target for every component set of ≤ 2 elements.
/// A dimension failure at height e forces N > e; a rank failure for (D, S) forces
/// N > e(D) − e(S). N_emp is the least N consistent with every failure seen.
pub fn threshold_scan(
    bundle: &ConicBundle,
    curve: &CurveDescriptor,
    d: i64,
    e_min: i64,
    e_max: i64,
) -> Result<Threshold> {
    let mut dims = Vec::new();
    let mut failures = Vec::new();
    let mut n_emp = e_min;
    for e in e_min..=e_max {
        for class in classes_of_type(bundle, d, e) {
            let space = section_space(bundle, &class)?;
            let chi = euler_char(bundle, curve, &class)?;
            let dim = space.dim();
            if dim as i64 != chi {
                n_emp = n_emp.max(e + 1);
            }
            dims.push(DimRecord {
                class: class.to_json(),
                e,
                dim,
                chi,
            });
            for s in small_component_sets(bundle, e) {
                if s.is_empty() {
                    continue;
                }
                let k = space.kernel(&s)?.len() as i64;
                let rank = dim as i64 - k;
                let target = space.restriction_target_set(&s);
                if rank != target {
                    n_emp = n_emp.max(e - s.height() + 1);
                    failures.push(SurjectivityFailure {
                        class: class.to_json(),
                        e,
                        components: s.labels(),
                        height: s.height(),
                        rank,
                        target,
                    });
                }
            }
        }
    }
    Ok(Threshold {
        d,
        e_min,
        e_max,
        n_emp,
        dims,
        surjectivity_failures: failures,
    })
}

/// Work estimate for enumerating every class of type (d, e).
pub fn enumeration_work(bundle: &ConicBundle, d: i64, e: i64) -> Result<u128> {
    let q = bundle.q();
    if bundle.l() == 0 {
        if e < 0 || e % 2 != 0 || d < 0 {
            return Ok(0);
        }
        return Ok(qpow(q, Bidegree { d: d as usize, a: (e / 2) as usize }.dim()));
    }
    let mut total = 0;
    for class in classes_of_type(bundle, d, e) {
        total += qpow(q, section_space(bundle, &class)?.dim());
    }
    Ok(total)
}
