mod common;

use conic_census::curve::{ClosedPoint, CurveDescriptor};
use conic_census::exec::Exec;
use conic_census::gf::{FieldElem, UniPoly};
use conic_census::linsys::bidegree::{prime_count_bidegree, Bidegree};
use conic_census::linsys::*;
use conic_census::picard::{classes_of_type, euler_char, NumClass, Side};
use conic_census::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn opts() -> ScanOptions {
    ScanOptions::default()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pt(p: u32, coeffs: &[i64]) -> ClosedPoint {
    let f = common::field(p);
    ClosedPoint::finite(&f, UniPoly::from_ints(&f, coeffs)).unwrap()
}

#[test]
fn dimension_examples() {
    let b = common::trivial3();
    assert_eq!(section_space(&b, &NumClass::new(1, 2)).unwrap().dim(), 9);
    assert_eq!(section_space(&b, &NumClass::new(0, 1)).unwrap().dim(), 2);
    assert_eq!(section_space(&b, &NumClass::new(1, -5)).unwrap().dim(), 0);
    assert!(matches!(
        section_space(&b, &NumClass::new(-1, 3)),
        Err(Error::EmptySpace(_))
    ));
    // conic multiples appear from d′ = 2 on: 6 monomials × 3 minus 1 × 3
    assert_eq!(section_space(&b, &NumClass::new(2, 2)).unwrap().dim(), 15);
}

#[test]
fn dimension_law_on_test_bundles() {
    let curve = CurveDescriptor::p1();
    for (b, n) in [(common::trivial3(), 0), (common::l1(), 0), (common::l2(), 4)] {
        for e in n..=n + 4 {
            for c in classes_of_type(&b, 2, e) {
                let dim = section_space(&b, &c).unwrap().dim() as i64;
                assert_eq!(dim, euler_char(&b, &curve, &c).unwrap(), "{}", c.to_json());
            }
        }
    }
    // d = 4 on the l = 1 bundle, where conic multiples matter
    for e in 2..=4 {
        for c in classes_of_type(&common::l1(), 4, e) {
            let dim = section_space(&common::l1(), &c).unwrap().dim() as i64;
            assert_eq!(dim, euler_char(&common::l1(), &curve, &c).unwrap());
        }
    }
}

#[test]
fn thresholds_are_frozen() {
    let curve = CurveDescriptor::p1();
    let t = |b| threshold_scan(&b, &curve, 2, 0, 8).unwrap().n_emp;
    assert_eq!(t(common::trivial3()), 0);
    assert_eq!(t(common::l1()), 0);
    assert_eq!(t(common::l2()), 4);
}

#[test]
fn proportion_examples() {
    let b = common::trivial3();
    let d = NumClass::new(1, 3);
    let space = section_space(&b, &d).unwrap();
    assert_eq!(proportion_exact(&space, &ComponentSet::default()).unwrap(), rat(1, 1));
    let fib = ComponentSet::new([Component::Fiber(pt(3, &[0, 1]))]);
    assert_eq!(proportion_exact(&space, &fib).unwrap(), rat(1, 27));
    assert_eq!(proportion_product(&b, &d, &fib).unwrap(), rat(1, 27));
    // height 8 > e = 6: only the zero section survives
    let big = ComponentSet::new([
        Component::Fiber(pt(3, &[1, 0, 1])),
        Component::Fiber(pt(3, &[2, 1, 1])),
    ]);
    assert_eq!(proportion_exact(&space, &big).unwrap(), rat(1, 3i64.pow(12)));
}

#[test]
fn proportion_product_examples() {
    let b = common::l1();
    let d = NumClass::new(1, 1);
    let inf = ClosedPoint::infinity();
    let t1 = pt(3, &[1, 1]);
    let smooth = ComponentSet::new([Component::Fiber(pt(3, &[2, 1]))]);
    let c1 = ComponentSet::new([Component::Fiber(inf)]);
    let line = ComponentSet::new([Component::Line(t1, Side::E)]);
    assert_eq!(proportion_product(&b, &d, &smooth).unwrap(), rat(1, 27));
    assert_eq!(proportion_product(&b, &d, &c1).unwrap(), rat(1, 81));
    assert_eq!(proportion_product(&b, &d, &line).unwrap(), rat(1, 9));
}

#[test]
fn nonsplit_fiber_kernel_has_codimension_d_plus_one() {
    // the restriction to a reduced conic has d+1 = 3 dimensional target
    let b = common::l1();
    let d = NumClass::new(1, 3);
    let space = section_space(&b, &d).unwrap();
    let c1 = ComponentSet::new([Component::Fiber(ClosedPoint::infinity())]);
    assert_eq!(proportion_exact(&space, &c1).unwrap(), rat(1, 27));
}

#[test]
fn trivial_bundle_fiberfree_oracle() {
    // q^{3a+3}(1 − q^{−3})(1 − q^{−2})/(q − 1) for a ≥ 1
    let b = common::trivial3();
    let expected = [13u128, 312, 8424, 227448];
    for a in 0..=3i64 {
        let space = section_space(&b, &NumClass::new(1, a)).unwrap();
        let c = fiberfree_count(&space, &opts()).unwrap();
        assert_eq!(c.scan, expected[a as usize]);
        assert_eq!(c.sieve, c.scan);
        let f = common::field(3);
        let bd = prime_count_bidegree(&f, Bidegree { d: 2, a: a as usize }, &opts()).unwrap();
        assert_eq!(bd.fiberfree, c.scan);
    }
}

#[test]
fn vertical_class_has_no_fiberfree_members() {
    let b = common::l1();
    let space = section_space(&b, &NumClass::new(0, 1)).unwrap();
    assert_eq!(space.dim(), 2);
    assert_eq!(fiberfree_count(&space, &opts()).unwrap().scan, 0);
    let empty = section_space(&b, &NumClass::new(1, -4)).unwrap();
    assert_eq!(fiberfree_count(&empty, &opts()).unwrap().scan, 0);
}

#[test]
fn scan_sieve_and_multiplicities_agree() {
    for b in [common::l1(), common::l2()] {
        for e in 1..=4 {
            for c in classes_of_type(&b, 2, e) {
                let space = section_space(&b, &c).unwrap();
                if space.dim() == 0 || space.dim() > 6 {
                    continue;
                }
                let count = fiberfree_count(&space, &opts()).unwrap();
                let q = 3u64;
                let mut direct = 0;
                for i in 1..q.pow(space.dim() as u32) {
                    let s = space.section(&space.coords_of_index(i));
                    if is_fiberfree(&space, &s).unwrap() {
                        direct += 1;
                    }
                }
                assert_eq!(direct / 2, count.scan, "{}", c.to_json());
            }
        }
    }
}

#[test]
fn multiplicity_examples() {
    let b = common::l1();
    let t1 = pt(3, &[1, 1]);
    // (t+1)·x has full-fiber multiplicity 1 at t+1 (b = 0, A = 1)
    let space = section_space(&b, &NumClass::new(1, 1)).unwrap();
    let amb = space.ambient().clone();
    let mut v = vec![FieldElem::ZERO; amb.width()];
    v[amb.coord(0, 0)] = FieldElem::ONE;
    v[amb.coord(0, 1)] = FieldElem::ONE;
    let c = space.coordinates_of(&v).unwrap();
    let s = space.section(&c);
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::FullFiber).unwrap(), 1);
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::E).unwrap(), 1);
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::EPrime).unwrap(), 1);
    assert_eq!(
        component_multiplicity(&space, &s, &ClosedPoint::infinity(), FiberPart::FullFiber).unwrap(),
        0
    );
    // the fiber at t = −1 is y² − x²; the linear form of E, with constant
    // coefficients, cuts out E there and misses E′
    let fiber = b.fiber(&t1).unwrap();
    let (le, _) = fiber.line_forms().unwrap();
    let mut w = vec![FieldElem::ZERO; amb.width()];
    for (i, x) in le.iter().enumerate() {
        w[amb.coord(i, 0)] = x[0];
    }
    let s = space.section(&space.coordinates_of(&w).unwrap());
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::E).unwrap(), 1);
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::EPrime).unwrap(), 0);
    // a generic section: z does not vanish on either line
    let mut z = vec![FieldElem::ZERO; amb.width()];
    z[amb.coord(2, 0)] = FieldElem::ONE;
    let s = space.section(&space.coordinates_of(&z).unwrap());
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::E).unwrap(), 0);
    assert_eq!(component_multiplicity(&space, &s, &t1, FiberPart::EPrime).unwrap(), 0);
    let zero = space.section(&vec![FieldElem::ZERO; space.dim()]);
    assert_eq!(
        component_multiplicity(&space, &zero, &t1, FiberPart::E),
        Err(Error::ZeroSection)
    );
}

#[test]
fn multiplicities_add_on_products() {
    let b = common::l1();
    let t1 = pt(3, &[1, 1]);
    let d1 = NumClass::new(1, 0).with_b(&t1, 1, Side::E);
    let s1 = section_space(&b, &d1).unwrap();
    let d2 = NumClass::new(1, 1);
    let s2 = section_space(&b, &d2).unwrap();
    let prod_class = d1.add(&d2);
    let sp = section_space(&b, &prod_class).unwrap();
    let f = common::field(3);
    for i in 1..3u64.pow(s1.dim() as u32) {
        let x = s1.section(&s1.coords_of_index(i));
        for j in [1u64, 5, 17, 100, 200] {
            if j >= 3u64.pow(s2.dim() as u32) {
                continue;
            }
            let y = s2.section(&s2.coords_of_index(j));
            let (_, w) = ambient::multiply(&f, &x.ambient, &x.coords, &y.ambient, &y.coords);
            let Some(c) = sp.coordinates_of(&w) else {
                panic!("product outside H⁰");
            };
            let z = sp.section(&c);
            for part in [FiberPart::E, FiberPart::EPrime] {
                let m = |sp: &SectionSpace, s: &Section| component_multiplicity(sp, s, &t1, part).unwrap();
                assert_eq!(m(&sp, &z), m(&s1, &x) + m(&s2, &y));
            }
        }
    }
}

#[test]
fn composite_counts_on_trivial_bundle() {
    let b = common::trivial3();
    let f = common::field(3);
    let c = prime_count_bidegree(&f, Bidegree { d: 2, a: 2 }, &opts()).unwrap();
    assert_eq!((c.fiberfree, c.composite, c.prime), (8424, 1164, 7260));
    let amb = prime_count_ambient(&b, 2, 4, &opts()).unwrap();
    assert_eq!(amb.prime, 7260);
    assert_eq!(prime_count(&b, 2, 4, &opts()).unwrap().prime, 7260);
    assert!(matches!(prime_count(&b, 2, 5, &opts()), Ok(p) if p.prime == 0));
}

#[test]
fn prime_counts_on_nontrivial_bundles() {
    // l = 1 has a non-split fiber, so no (2, e) divisor splits
    let b = common::l1();
    for e in 1..=3 {
        let p = prime_count(&b, 2, e, &opts()).unwrap();
        assert_eq!(p.prime, p.fiberfree);
        assert_eq!(p.fiberfree, fiberfree_total(&b, 2, e, &opts()).unwrap());
    }
    assert_eq!(prime_count(&b, 3, 4, &opts()).unwrap_err(), Error::OddDegreeUnsupported(3));
    // d = 4: composites are sums of two (2, ·) divisors
    let p = prime_count(&b, 4, 2, &opts()).unwrap();
    assert!(p.prime <= p.fiberfree);
    let m = |e| prime_count(&b, 2, e, &opts()).unwrap().prime;
    let (m0, m1, m2) = (m(0), m(1), m(2));
    assert_eq!(p.fiberfree - p.prime, m0 * m2 + m1 * (m1 + 1) / 2);
}

#[test]
fn budget_is_enforced() {
    let b = common::trivial3();
    let space = section_space(&b, &NumClass::new(1, 3)).unwrap();
    let small = ScanOptions { budget: 1000, exec: Exec::Sequential };
    assert!(matches!(
        fiberfree_count(&space, &small),
        Err(Error::EnumerationBudgetExceeded { .. })
    ));
}

#[test]
fn sequential_and_parallel_agree() {
    let b = common::l2();
    for c in classes_of_type(&b, 2, 5) {
        let space = section_space(&b, &c).unwrap();
        let s = fiberfree_count(&space, &ScanOptions { exec: Exec::Sequential, ..opts() }).unwrap();
        let p = fiberfree_count(&space, &ScanOptions { exec: Exec::Parallel, ..opts() }).unwrap();
        assert_eq!(s, p);
    }
}

#[test]
fn multiplicativity_for_disjoint_sets() {
    let b = common::trivial3();
    let d = NumClass::new(1, 4);
    let space = section_space(&b, &d).unwrap();
    let s1 = ComponentSet::new([Component::Fiber(ClosedPoint::infinity())]);
    let s2 = ComponentSet::new([Component::Fiber(pt(3, &[1, 0, 1]))]);
    let both = ComponentSet::new(s1.elements.iter().chain(&s2.elements).cloned());
    assert_eq!(
        proportion_exact(&space, &both).unwrap(),
        proportion_exact(&space, &s1).unwrap() * proportion_exact(&space, &s2).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplicity_is_scale_invariant(idx in 1u64..3u64.pow(7), lam in 1u32..3) {
        let b = common::l1();
        let t1 = pt(3, &[1, 1]);
        let space = section_space(&b, &NumClass::new(1, 1).with_b(&t1, 1, Side::E)).unwrap();
        let idx = idx % 3u64.pow(space.dim() as u32);
        prop_assume!(idx != 0);
        let c = space.coords_of_index(idx);
        let f = common::field(3);
        let scaled: Vec<FieldElem> = c.iter().map(|&x| f.mul(x, FieldElem(lam))).collect();
        let s = space.section(&c);
        let t = space.section(&scaled);
        for p in [ClosedPoint::infinity(), pt(3, &[0, 1]), t1.clone()] {
            prop_assert_eq!(
                component_multiplicity(&space, &s, &p, FiberPart::FullFiber).unwrap(),
                component_multiplicity(&space, &t, &p, FiberPart::FullFiber).unwrap()
            );
        }
        for part in [FiberPart::E, FiberPart::EPrime] {
            prop_assert_eq!(
                component_multiplicity(&space, &s, &t1, part).unwrap(),
                component_multiplicity(&space, &t, &t1, part).unwrap()
            );
        }
    }
}
