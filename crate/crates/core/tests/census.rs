mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use conic_census::census::*;
use conic_census::curve::{zeta_value, ClosedPoint, CurveDescriptor};
use conic_census::decimal::Fixed;
use conic_census::exec::Exec;
use conic_census::linsys::ScanOptions;
use conic_census::Error;

use common::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn k_bar_by_point() {
    let b = l1();
    let split = b.split_fibers().next().unwrap().point.clone();
    let mut bbar = BTreeMap::new();
    // C¹ points at inf and t contribute (1 − 3⁻⁴)/(1 − 3⁻³) each
    let c1 = r(80, 81) / r(26, 27);
    bbar.insert(split.clone(), 0);
    assert_eq!(k_bar(&b, 2, &bbar).unwrap(), &c1 * &c1 * r(32, 39));
    bbar.insert(split.clone(), 1);
    assert_eq!(k_bar(&b, 2, &bbar).unwrap(), &c1 * &c1 * r(2, 3));
    bbar.insert(split, 2);
    assert!(matches!(k_bar(&b, 2, &bbar), Err(Error::BOutOfRange { .. })));
    let mut bad = BTreeMap::new();
    bad.insert(ClosedPoint::infinity(), 0);
    assert!(matches!(k_bar(&b, 2, &bad), Err(Error::NotASplitFiber(_))));
    assert_eq!(k_bar(&trivial3(), 2, &BTreeMap::new()).unwrap(), r(1, 1));
}

#[test]
fn predict_examples() {
    let p1 = CurveDescriptor::p1();
    let t = trivial3();
    let p = predict(&t, &p1, 2, 4).unwrap();
    assert_eq!(p.main, SqrtQRational::rational(3, r(8424, 1)));
    assert_eq!(p.error_scale, SqrtQRational::rational(3, r(81, 1)));
    assert_eq!(
        predict(&t, &p1, 2, 8).unwrap().main,
        SqrtQRational::rational(3, r(6141096, 1))
    );
    assert!(matches!(predict(&t, &p1, 3, 4), Err(Error::OddDegreeUnsupported(3))));
}

#[test]
fn untwisted_bundles_reduce_to_curve_constant() {
    for (g, lp) in [(0u32, vec![1i64]), (1, vec![1, -1, 3]), (2, vec![1, 0, 1, 0, 9])] {
        let j: i64 = lp.iter().sum();
        let curve = CurveDescriptor::new(g, j as u64, lp).unwrap();
        for d in [2i64, 4] {
            let lc = leading_coeff_profile(&SingularProfile::smooth(3), 0, &curve, d).unwrap();
            let exp = (d + 1) * (1 - g as i64);
            let power = num_traits::pow(r(3, 1), exp.unsigned_abs() as usize);
            let untwisted = if exp >= 0 { r(j, 1) * power } else { r(j, 1) / power };
            let expected = untwisted / (r(2, 1) * zeta_value(&curve, 3, d + 1).unwrap());
            assert_eq!(lc, SqrtQRational::rational(3, expected), "g={g} d={d}");
        }
    }
}

#[test]
fn compare_table_rows() {
    let t = trivial3();
    let opts = ScanOptions { exec: Exec::Sequential, ..Default::default() };
    let rows = compare_table(&t, &CurveDescriptor::p1(), 2, &[], &opts, 10).unwrap();
    assert!(rows.is_empty());
    let rows = compare_table(&t, &CurveDescriptor::p1(), 2, &[1, 4], &opts, 10).unwrap();
    assert_eq!(rows[0].enumerated_m, 0);
    assert_eq!(rows[1].enumerated_mf, 8424);
    assert_eq!(rows[1].enumerated_m, 7260);
    assert_eq!(rows[1].ratio.to_string(), "0.8618233618");
}

#[test]
fn decimal_round_trip_keeps_exact_part() {
    let x = SqrtQRational::new(3, r(32, 39), r(4, 9));
    let dec = x.to_fixed(50);
    let back = Fixed::from_rational(x.u(), 60)
        .add(&Fixed::from_rational(x.v(), 60).mul(&Fixed::from_int(&BigInt::from(3), 60).sqrt()))
        .round_to(50);
    assert_eq!(dec, back);
    assert_eq!(x.to_json(50)["exact"], "32/39 + (4/9)*sqrt(3)");
}

fn profile_strategy() -> impl Strategy<Value = (SingularProfile, i64)> {
    (
        prop::sample::select(vec![3u64, 5, 7, 9]),
        prop::collection::vec(1usize..4, 0..3),
        prop::collection::vec(1usize..4, 0..3),
        1i64..4,
    )
        .prop_map(|(q, c1, c2, h)| (SingularProfile { q, c1, c2 }, 2 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_bar_is_symmetric_in_b((p, d) in profile_strategy(), seed in any::<u64>()) {
        let bounds: Vec<i64> = p.c2.iter().map(|&m| d / 2 / m as i64).collect();
        let b: Vec<i64> = bounds
            .iter()
            .enumerate()
            .map(|(i, &x)| ((seed >> (8 * i)) as i64).rem_euclid(2 * x + 1) - x)
            .collect();
        let neg: Vec<i64> = b.iter().map(|x| -x).collect();
        prop_assert_eq!(k_bar_profile(&p, d, &b).unwrap(), k_bar_profile(&p, d, &neg).unwrap());
    }

    #[test]
    fn literal_and_factored_k_agree((p, d) in profile_strategy()) {
        prop_assert_eq!(k_const_profile(&p, d), k_const_factored(&p, d));
    }

    #[test]
    fn leading_coefficient_is_positive((p, d) in profile_strategy(), l in 0i64..4) {
        let lc = leading_coeff_profile(&p, l, &CurveDescriptor::p1(), d).unwrap();
        prop_assert_eq!(lc.signum(), 1);
    }

    #[test]
    fn predict_steps_by_q_to_the_d_plus_one(e in 0i64..12, h in 1i64..3) {
        let d = 2 * h;
        let b = l2();
        let c = CurveDescriptor::p1();
        let lo = predict(&b, &c, d, e).unwrap().main;
        let hi = predict(&b, &c, d, e + 2).unwrap().main;
        let step = SqrtQRational::rational(3, num_traits::pow(r(3, 1), (d + 1) as usize));
        prop_assert_eq!(hi, lo.mul(&step));
    }
}
