//! Finite fields of odd characteristic, polynomials over them, and linear algebra.

mod factor;
mod field;
pub mod linalg;
mod poly;
mod residue;

pub use factor::{
    factor_poly, is_irreducible, is_square_poly, is_squarefree, monic_irreducibles,
    Factorization,
};
pub use field::{make_field, FieldDesc, FieldElem, FieldSpec, MAX_TABLE_ORDER};
pub use poly::UniPoly;
pub use residue::{ResElem, ResidueField};

/// Squareness in F_q.
pub fn is_square(field: &FieldDesc, x: FieldElem) -> crate::error::Result<bool> {
    field.is_square(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> std::sync::Arc<FieldDesc> {
        make_field(3, 1).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f = f3();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 3);
        let f9 = make_field(3, 2).unwrap();
        // t^2 + 1 is the least of t^2+1, t^2+t+2, t^2+2t+2
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(make_field(2, 1).unwrap_err(), crate::Error::CharTwoUnsupported);
        assert_eq!(make_field(9, 1).unwrap_err(), crate::Error::NotPrime(9));
        assert!(matches!(make_field(3, 7), Err(crate::Error::FieldTooLarge(2187))));
    }

    #[test]
    fn canonical_cubic_modulus() {
        // t^3+1 and t^3+t^2+1 have roots; t^3+2t^2+1 has none
        let f27 = make_field(3, 3).unwrap();
        assert_eq!(f27.modulus(), &[1, 0, 2, 1]);
    }

    #[test]
    fn factor_examples() {
        let f = f3();
        let g = UniPoly::from_ints(&f, &[-1, 0, 1]);
        let fac = factor_poly(&f, &g).unwrap();
        assert_eq!(
            fac.factors,
            vec![
                (UniPoly::from_ints(&f, &[1, 1]), 1),
                (UniPoly::from_ints(&f, &[2, 1]), 1)
            ]
        );
        let g = UniPoly::from_ints(&f, &[1, 0, 1]);
        assert_eq!(factor_poly(&f, &g).unwrap().factors, vec![(g.clone(), 1)]);
        let g = UniPoly::from_ints(&f, &[0, -1, 0, 1]);
        let fac = factor_poly(&f, &g).unwrap();
        assert_eq!(fac.factors.len(), 3);
        assert_eq!(fac.factors[0].0, UniPoly::x());
        assert_eq!(
            factor_poly(&f, &UniPoly::zero()).unwrap_err(),
            crate::Error::ZeroPolynomial
        );
    }

    #[test]
    fn factor_with_repeated_and_pth_power_factors() {
        let f = f3();
        // (t+1)^3 (t^2+1)^2 (t)
        let a = UniPoly::from_ints(&f, &[1, 1]).pow(3, &f);
        let b = UniPoly::from_ints(&f, &[1, 0, 1]).pow(2, &f);
        let g = a.mul(&b, &f).mul(&UniPoly::x(), &f).scale(f.from_int(2), &f);
        let fac = factor_poly(&f, &g).unwrap();
        assert_eq!(fac.unit, f.from_int(2));
        assert_eq!(fac.expand(&f), g);
        let mults: Vec<u32> = fac.factors.iter().map(|x| x.1).collect();
        assert_eq!(mults, vec![1, 3, 2]);
    }

    #[test]
    fn factor_exhaustive_degree_six_over_f3() {
        let f = f3();
        for deg in 1..=6u32 {
            for k in 0..3u64.pow(deg) {
                let mut c: Vec<i64> = (0..deg).map(|i| ((k / 3u64.pow(i)) % 3) as i64).collect();
                c.push(1);
                let g = UniPoly::from_ints(&f, &c);
                let fac = factor_poly(&f, &g).unwrap();
                assert_eq!(fac.expand(&f), g);
                for (h, _) in &fac.factors {
                    assert!(h.is_monic() && is_irreducible(&f, h));
                }
            }
        }
    }

    #[test]
    fn square_examples() {
        let f = f3();
        assert!(f.is_square(f.one()).unwrap());
        assert!(!f.is_square(f.from_int(-1)).unwrap());
        let f9 = make_field(3, 2).unwrap();
        assert!(f9.is_square(f9.neg(f9.one())).unwrap());
        assert_eq!(f.is_square(f.zero()).unwrap_err(), crate::Error::ZeroElement);
    }

    #[test]
    fn is_square_matches_exhaustive_search() {
        for (p, n) in [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (11, 1), (13, 1)] {
            let f = make_field(p, n).unwrap();
            let squares: std::collections::HashSet<FieldElem> =
                f.elements().map(|y| f.mul(y, y)).collect();
            for x in f.elements().skip(1) {
                assert_eq!(f.is_square(x).unwrap(), squares.contains(&x));
            }
        }
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        let f = f3();
        assert_eq!(monic_irreducibles(&f, 1).len(), 3);
        assert_eq!(monic_irreducibles(&f, 2).len(), 3);
        assert_eq!(monic_irreducibles(&f, 3).len(), 8);
        assert_eq!(monic_irreducibles(&f, 4).len(), 18);
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(monic_irreducibles(&f9, 2).len(), 36);
    }

    #[test]
    fn residue_field_squares() {
        let f = f3();
        let k = ResidueField::new(f.clone(), UniPoly::from_ints(&f, &[1, 0, 1]));
        assert_eq!(k.order(), 9);
        let minus_one = k.from_base(f.from_int(-1));
        assert!(k.is_square(&minus_one).unwrap());
        let r = k.sqrt(&minus_one).unwrap();
        assert_eq!(k.mul(&r, &r), minus_one);
        let theta = k.theta();
        let inv = k.inv(&theta).unwrap();
        assert_eq!(k.mul(&theta, &inv), k.one());
    }

    #[test]
    fn squares_in_polynomial_ring() {
        let f = f3();
        let g = UniPoly::from_ints(&f, &[1, 1]).pow(2, &f);
        assert!(is_square_poly(&f, &g));
        assert!(!is_square_poly(&f, &g.scale(f.from_int(2), &f)));
        assert!(!is_square_poly(&f, &UniPoly::from_ints(&f, &[1, 0, 1])));
        assert!(is_square_poly(&f, &UniPoly::zero()));
    }

    #[test]
    fn nullspace_of_small_matrix() {
        let f = f3();
        let e = |v: i64| f.from_int(v);
        let rows = vec![vec![e(1), e(1), e(0)], vec![e(0), e(1), e(1)]];
        let ns = linalg::nullspace(&rows, 3, &f);
        assert_eq!(ns.len(), 1);
        assert!(linalg::apply(&rows, &ns[0], &f).iter().all(|c| c.is_zero()));
    }

    fn field_strategy() -> impl Strategy<Value = (u32, u32)> {
        prop_oneof![Just((3, 1)), Just((5, 1)), Just((3, 2)), Just((7, 1)), Just((3, 3)), Just((5, 2))]
    }

    proptest! {
        #[test]
        fn field_axioms((p, n) in field_strategy(), a in 0u32..1024, b in 0u32..1024, c in 0u32..1024) {
            let f = make_field(p, n).unwrap();
            let (a, b, c) = (FieldElem(a % f.q()), FieldElem(b % f.q()), FieldElem(c % f.q()));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a)), f.one());
            }
            prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
            prop_assert_eq!(f.pth_root(f.frobenius(a)), a);
        }

        #[test]
        fn polynomial_division((p, n) in field_strategy(), xs in proptest::collection::vec(0u32..1024, 0..9), ys in proptest::collection::vec(0u32..1024, 1..6)) {
            let f = make_field(p, n).unwrap();
            let a = UniPoly::new(xs.iter().map(|&x| FieldElem(x % f.q())).collect());
            let mut yc: Vec<FieldElem> = ys.iter().map(|&x| FieldElem(x % f.q())).collect();
            *yc.last_mut().unwrap() = f.one();
            let b = UniPoly::new(yc);
            let (qt, r) = a.divrem(&b, &f);
            prop_assert_eq!(qt.mul(&b, &f).add(&r, &f), a.clone());
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
            let (g, u, v) = a.xgcd(&b, &f);
            prop_assert_eq!(u.mul(&a, &f).add(&v.mul(&b, &f), &f), g);
        }

        #[test]
        fn factorization_over_f9_and_f5((p, n) in prop_oneof![Just((3u32, 2u32)), Just((5, 1))], xs in proptest::collection::vec(0u32..1024, 1..8)) {
            let f = make_field(p, n).unwrap();
            let g = UniPoly::new(xs.iter().map(|&x| FieldElem(x % f.q())).collect());
            prop_assume!(!g.is_zero());
            let fac = factor_poly(&f, &g).unwrap();
            prop_assert_eq!(fac.expand(&f), g);
            for (h, _) in &fac.factors {
                prop_assert!(is_irreducible(&f, h));
            }
        }
    }
}
