//! Closed points of P¹ and zeta functions of the base curve.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::decimal::Fixed;
use crate::error::{Error, Result};
use crate::gf::{is_irreducible, monic_irreducibles, FieldDesc, FieldElem, ResidueField, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointRepr {
    Infinity,
    Finite(UniPoly),
}

/// A closed point of P¹ over F_q: ∞ = (s:t) = (0:1), or a monic irreducible in t.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPoint {
    repr: PointRepr,
    key: Vec<u32>,
    label: String,
}

impl ClosedPoint {
    pub fn infinity() -> Self {
        ClosedPoint {
            repr: PointRepr::Infinity,
            key: Vec::new(),
            label: "inf".to_string(),
        }
    }

    pub fn finite(field: &FieldDesc, poly: UniPoly) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !poly.is_monic() || !is_irreducible(field, &poly) {
            return Err(Error::InvalidCurve(format!(
                "{} is not monic irreducible",
                poly.format(field)
            )));
        }
        Ok(Self::finite_unchecked(field, poly))
    }

    pub(crate) fn finite_unchecked(field: &FieldDesc, poly: UniPoly) -> Self {
        let key = poly
            .coeffs()
            .iter()
            .flat_map(|&c| field.lex_key(c))
            .collect();
        let label = poly.format(field);
        ClosedPoint {
            repr: PointRepr::Finite(poly),
            key,
            label,
        }
    }

    pub fn repr(&self) -> &PointRepr {
        &self.repr
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.repr, PointRepr::Infinity)
    }

    pub fn poly(&self) -> Option<&UniPoly> {
        match &self.repr {
            PointRepr::Finite(p) => Some(p),
            PointRepr::Infinity => None,
        }
    }

    pub fn degree(&self) -> usize {
        match &self.repr {
            PointRepr::Infinity => 1,
            PointRepr::Finite(p) => p.degree().unwrap_or(0),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// κ(P); for ∞ this is F_q presented as F_q[t]/(t).
    pub fn residue_field(&self, field: &Arc<FieldDesc>) -> ResidueField {
        match &self.repr {
            PointRepr::Infinity => ResidueField::trivial(field.clone()),
            PointRepr::Finite(p) => ResidueField::new(field.clone(), p.clone()),
        }
    }

    /// The defining binary form p_P(s,t), coefficient of s^{m−i} t^i at index i.
    pub fn homogeneous(&self) -> Vec<FieldElem> {
        match &self.repr {
            PointRepr::Infinity => vec![FieldElem::ONE, FieldElem::ZERO],
            PointRepr::Finite(p) => p.coeffs().to_vec(),
        }
    }

    pub fn to_json(&self, field: &FieldDesc) -> serde_json::Value {
        match &self.repr {
            PointRepr::Infinity => serde_json::json!({"point": "inf", "degree": 1}),
            PointRepr::Finite(p) => serde_json::json!({
                "point": self.label,
                "degree": self.degree(),
                "poly": p.coeffs().iter().map(|&c| field.digits(c)).collect::<Vec<_>>(),
            }),
        }
    }
}

impl Ord for ClosedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (PointRepr::Infinity, PointRepr::Infinity) => Ordering::Equal,
            (PointRepr::Infinity, _) => Ordering::Less,
            (_, PointRepr::Infinity) => Ordering::Greater,
            _ => self
                .degree()
                .cmp(&other.degree())
                .then_with(|| self.key.cmp(&other.key)),
        }
    }
}

impl PartialOrd for ClosedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// All closed points of degree exactly m, in canonical order.
pub fn closed_points_of_degree(field: &FieldDesc, m: usize) -> Vec<ClosedPoint> {
    let mut out = Vec::new();
    if m == 1 {
        out.push(ClosedPoint::infinity());
    }
    for g in monic_irreducibles(field, m) {
        out.push(ClosedPoint::finite_unchecked(field, g));
    }
    out
}

pub fn closed_points_up_to(field: &FieldDesc, b: usize) -> Vec<ClosedPoint> {
    (1..=b).flat_map(|m| closed_points_of_degree(field, m)).collect()
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            result = -result;
        }
        k += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of closed points of degree m on P¹ over F_q.
pub fn count_closed_points(q: u64, m: u64) -> BigInt {
    let mut total = BigInt::zero();
    for k in 1..=m {
        if m % k == 0 {
            total += BigInt::from(mobius(m / k)) * num_traits::pow(BigInt::from(q), k as usize);
        }
    }
    let mut n = total / BigInt::from(m);
    if m == 1 {
        n += 1;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub genus: u32,
    pub jacobian: u64,
    pub l_poly: Vec<i64>,
}

impl CurveDescriptor {
    pub fn p1() -> Self {
        CurveDescriptor {
            genus: 0,
            jacobian: 1,
            l_poly: vec![1],
        }
    }

    pub fn new(genus: u32, jacobian: u64, l_poly: Vec<i64>) -> Result<Self> {
        let c = CurveDescriptor {
            genus,
            jacobian,
            l_poly,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_poly.len() != 2 * self.genus as usize + 1 {
            return Err(Error::InvalidCurve(format!(
                "l_poly has length {}, expected {}",
                self.l_poly.len(),
                2 * self.genus + 1
            )));
        }
        if self.l_poly[0] != 1 {
            return Err(Error::InvalidCurve("l_poly(0) must be 1".into()));
        }
        if self.jacobian == 0 {
            return Err(Error::InvalidCurve("jacobian must be positive".into()));
        }
        let p1: i64 = self.l_poly.iter().sum();
        if p1 != self.jacobian as i64 {
            return Err(Error::InvalidCurve(format!(
                "jacobian {} differs from P(1) = {}",
                self.jacobian, p1
            )));
        }
        Ok(())
    }
}

fn q_pow(q: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// ζ_C(s) = P(q^{−s}) / ((1−q^{−s})(1−q^{1−s})), exact.
pub fn zeta_value(curve: &CurveDescriptor, q: u64, s: i64) -> Result<BigRational> {
    if s <= 1 {
        return Err(Error::OutsideConvergenceRegion(s));
    }
    let mut num = BigRational::zero();
    for (i, &c) in curve.l_poly.iter().enumerate() {
        num += BigRational::from_integer(BigInt::from(c)) * q_pow(q, -(s * i as i64));
    }
    let one = BigRational::one();
    let den = (&one - q_pow(q, -s)) * (&one - q_pow(q, 1 - s));
    Ok(num / den)
}

/// Partial Euler product over closed points of P¹ of degree ≤ b, exact.
/// Sizes grow like q^b digits; use [`zeta_truncated_fixed`] beyond b ≈ 8.
pub fn zeta_truncated(field: &FieldDesc, s: i64, b: usize) -> Result<BigRational> {
    if s <= 1 {
        return Err(Error::OutsideConvergenceRegion(s));
    }
    let q = field.q() as u64;
    let mut acc = BigRational::one();
    for m in 1..=b as u64 {
        let x = q_pow(q, s * m as i64);
        let factor = &x / (&x - BigRational::one());
        let n = count_closed_points(q, m);
        let n: usize = n.try_into().expect("point count fits in usize");
        acc *= num_traits::pow(factor, n);
    }
    Ok(acc)
}

/// Partial Euler product in fixed-point arithmetic with `digits` decimals.
pub fn zeta_truncated_fixed(q: u64, s: i64, b: usize, digits: u32) -> Result<Fixed> {
    if s <= 1 {
        return Err(Error::OutsideConvergenceRegion(s));
    }
    let guard = digits + 20;
    let mut acc = Fixed::one(guard);
    for m in 1..=b as u64 {
        let x = q_pow(q, s * m as i64);
        let factor = Fixed::from_rational(&(&x / (&x - BigRational::one())), guard);
        let n: u64 = count_closed_points(q, m).try_into().expect("point count fits");
        acc = acc.mul(&factor.pow(n));
    }
    Ok(acc.round_to(digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn closed_point_examples() {
        let f3 = make_field(3, 1).unwrap();
        let pts = closed_points_up_to(&f3, 1);
        assert_eq!(pts.len(), 4);
        assert!(pts[0].is_infinity());
        assert_eq!(pts[1].label(), "t");
        assert_eq!(closed_points_up_to(&f3, 2).len(), 7);
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(closed_points_up_to(&f5, 1).len(), 6);
    }

    #[test]
    fn point_count_identity() {
        for (p, n) in [(3, 1), (5, 1), (3, 2)] {
            let f = make_field(p, n).unwrap();
            let q = f.q() as u64;
            for m in 1..=4usize {
                if q.pow(m as u32) > 10_000 {
                    continue;
                }
                let mut total = 0u64;
                for k in 1..=m {
                    if m % k == 0 {
                        let cnt = closed_points_of_degree(&f, k).len() as u64;
                        assert_eq!(BigInt::from(cnt), count_closed_points(q, k as u64));
                        total += k as u64 * cnt;
                    }
                }
                assert_eq!(total, q.pow(m as u32) + 1);
            }
        }
    }

    #[test]
    fn zeta_examples() {
        let p1 = CurveDescriptor::p1();
        assert_eq!(zeta_value(&p1, 3, 3).unwrap(), r(243, 208));
        assert_eq!(zeta_value(&p1, 3, 2).unwrap(), r(27, 16));
        assert_eq!(zeta_value(&p1, 3, 1).unwrap_err(), Error::OutsideConvergenceRegion(1));
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(zeta_truncated(&f3, 3, 1).unwrap(), num_traits::pow(r(27, 26), 4));
        assert_eq!(zeta_truncated(&f3, 2, 1).unwrap(), num_traits::pow(r(9, 8), 4));
    }

    #[test]
    fn truncation_is_monotone_and_within_bound() {
        let f3 = make_field(3, 1).unwrap();
        let p1 = CurveDescriptor::p1();
        for s in [2i64, 3] {
            let full = zeta_value(&p1, 3, s).unwrap();
            let mut prev = BigRational::zero();
            for b in 1..=6 {
                let t = zeta_truncated(&f3, s, b).unwrap();
                assert!(t >= prev && t <= full);
                let bound = r(4, 1) * q_pow(3, -((b as i64 + 1) * (s - 1)));
                assert!(&full - &t < bound);
                prev = t;
            }
        }
    }

    #[test]
    fn zeta_denominator_divides() {
        let c = CurveDescriptor::new(1, 3, vec![1, -1, 3]).unwrap();
        for s in 2..6i64 {
            let z = zeta_value(&c, 3, s).unwrap();
            let p3 = |e: i64| num_traits::pow(BigInt::from(3), e as usize);
            let bound = (p3(s) - 1) * (p3(s - 1) - 1) * p3(2 * s);
            let rem: BigInt = &bound % z.denom();
            assert!(rem.is_zero());
        }
    }

    #[test]
    fn descriptor_validation() {
        assert!(CurveDescriptor::new(0, 1, vec![1]).is_ok());
        assert!(CurveDescriptor::new(0, 2, vec![1]).is_err());
        assert!(CurveDescriptor::new(1, 3, vec![1, -1]).is_err());
        assert!(CurveDescriptor::new(1, 3, vec![2, -2, 3]).is_err());
    }

    #[test]
    fn fixed_truncation_tracks_exact() {
        let f3 = make_field(3, 1).unwrap();
        let exact = zeta_truncated(&f3, 3, 5).unwrap();
        let fixed = zeta_truncated_fixed(3, 3, 5, 40).unwrap();
        assert_eq!(fixed, Fixed::from_rational(&exact, 40));
    }
}
