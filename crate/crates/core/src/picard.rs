//! Numerical divisor classes d′H + aF + Σ b_P E_P, the intersection pairing,
//! type (d, e) and the Euler characteristic.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bundle::ConicBundle;
use crate::curve::{ClosedPoint, CurveDescriptor};
use crate::error::{Error, Result};

/// Which component of a split fiber a coefficient refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    E,
    EPrime,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::E => Side::EPrime,
            Side::EPrime => Side::E,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BCoeff {
    pub value: i64,
    pub side: Side,
}

/// A numerical class. `d` is the fiber degree D·F, so the H-coefficient is
/// d′ = d/2; odd d only exists on bundles with l = 0, where H = 2·(section).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumClass {
    pub d: i64,
    pub a: i64,
    pub b: BTreeMap<ClosedPoint, BCoeff>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypePair {
    pub d: i64,
    pub e: i64,
}

impl NumClass {
    pub fn new(dprime: i64, a: i64) -> Self {
        NumClass {
            d: 2 * dprime,
            a,
            b: BTreeMap::new(),
        }
    }

    /// Class with fiber degree d (possibly odd) and no split coefficients.
    pub fn with_fiber_degree(d: i64, a: i64) -> Self {
        NumClass {
            d,
            a,
            b: BTreeMap::new(),
        }
    }

    pub fn h() -> Self {
        NumClass::new(1, 0)
    }

    pub fn f() -> Self {
        NumClass::new(0, 1)
    }

    pub fn component(point: &ClosedPoint, side: Side) -> Self {
        NumClass::new(0, 0).with_b(point, 1, side)
    }

    pub fn with_b(mut self, point: &ClosedPoint, value: i64, side: Side) -> Self {
        if value == 0 {
            self.b.remove(point);
        } else {
            self.b.insert(point.clone(), BCoeff { value, side });
        }
        self
    }

    pub fn dprime(&self) -> Option<i64> {
        (self.d % 2 == 0).then_some(self.d / 2)
    }

    /// (a, b) with every coefficient rewritten on E_P, using E′_P = deg P·F − E_P.
    pub fn canonical(&self) -> (i64, BTreeMap<ClosedPoint, i64>) {
        let mut a = self.a;
        let mut b = BTreeMap::new();
        for (p, c) in &self.b {
            let v = match c.side {
                Side::E => c.value,
                Side::EPrime => {
                    a += c.value * p.degree() as i64;
                    -c.value
                }
            };
            if v != 0 {
                b.insert(p.clone(), v);
            }
        }
        (a, b)
    }

    pub fn canonicalized(&self) -> NumClass {
        let (a, b) = self.canonical();
        NumClass {
            d: self.d,
            a,
            b: b
                .into_iter()
                .map(|(p, v)| (p, BCoeff { value: v, side: Side::E }))
                .collect(),
        }
    }

    /// Coefficient on E_P after canonicalization.
    pub fn b_on_e(&self, point: &ClosedPoint) -> i64 {
        match self.b.get(point) {
            None => 0,
            Some(c) if c.side == Side::E => c.value,
            Some(c) => -c.value,
        }
    }

    pub fn numerically_equal(&self, other: &NumClass) -> bool {
        self.d == other.d && self.canonical() == other.canonical()
    }

    pub fn add(&self, other: &NumClass) -> NumClass {
        let (a1, b1) = self.canonical();
        let (a2, mut b2) = other.canonical();
        for (p, v) in b1 {
            *b2.entry(p).or_insert(0) += v;
        }
        NumClass {
            d: self.d + other.d,
            a: a1 + a2,
            b: b2
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|(p, v)| (p, BCoeff { value: v, side: Side::E }))
                .collect(),
        }
    }

    pub fn neg(&self) -> NumClass {
        NumClass {
            d: -self.d,
            a: -self.a,
            b: self
                .b
                .iter()
                .map(|(p, c)| {
                    (
                        p.clone(),
                        BCoeff {
                            value: -c.value,
                            side: c.side,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &NumClass) -> NumClass {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        let (a, b) = self.canonical();
        self.d == 0 && a == 0 && b.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let b: Vec<serde_json::Value> = self
            .b
            .iter()
            .map(|(p, c)| {
                serde_json::json!({
                    "point": p.label(),
                    "coeff": c.value,
                    "side": c.side,
                })
            })
            .collect();
        let mut m = serde_json::Map::new();
        m.insert("d".into(), self.d.into());
        if let Some(dp) = self.dprime() {
            m.insert("dprime".into(), dp.into());
        }
        m.insert("a".into(), self.a.into());
        m.insert("b".into(), b.into());
        serde_json::Value::Object(m)
    }
}

/// Check that a class lives on this bundle.
pub fn check_class(bundle: &ConicBundle, d: &NumClass) -> Result<()> {
    for p in d.b.keys() {
        if !bundle.is_split(p) {
            return Err(Error::BundleMismatch(format!(
                "{} is not a split fiber of this bundle",
                p.label()
            )));
        }
    }
    if d.d % 2 != 0 && bundle.l() != 0 {
        return Err(Error::OddDegreeUnsupported(d.d));
    }
    Ok(())
}

/// The intersection pairing, weighted by deg P at split points.
pub fn intersect(bundle: &ConicBundle, d1: &NumClass, d2: &NumClass) -> Result<i64> {
    check_class(bundle, d1)?;
    check_class(bundle, d2)?;
    let l = bundle.l() as i64;
    let (a1, b1) = d1.canonical();
    let (a2, b2) = d2.canonical();
    // four times the pairing, to keep half-integral H-coefficients exact
    let mut four = d1.d * d2.d * l + 4 * (d1.d * a2 + a1 * d2.d);
    for (p, &v) in &b1 {
        four += 2 * p.degree() as i64 * v * d2.d;
    }
    for (p, &v) in &b2 {
        four += 2 * p.degree() as i64 * v * d1.d;
    }
    for (p, &v1) in &b1 {
        if let Some(&v2) = b2.get(p) {
            four -= 4 * p.degree() as i64 * v1 * v2;
        }
    }
    debug_assert_eq!(four % 4, 0);
    Ok(four / 4)
}

pub fn canonical_class(bundle: &ConicBundle, curve: &CurveDescriptor) -> NumClass {
    NumClass::new(-1, 2 * curve.genus as i64 - 2 + bundle.l() as i64)
}

pub fn type_of(bundle: &ConicBundle, d: &NumClass) -> Result<TypePair> {
    Ok(TypePair {
        d: intersect(bundle, d, &NumClass::f())?,
        e: intersect(bundle, d, &NumClass::h())?,
    })
}

/// ½[(d+1)(e+2−2g) − l((d/2+1)²−1) − Σ b_P² deg P] from raw data.
/// `b` lists (b_P, deg P).
pub fn euler_char_for_type(d: i64, e: i64, g: i64, l: i64, b: &[(i64, usize)]) -> Result<i64> {
    let sum_b: i64 = b.iter().map(|&(v, m)| v * v * m as i64).sum();
    let eight = 4 * (d + 1) * (e + 2 - 2 * g) - l * ((d + 2) * (d + 2) - 4) - 4 * sum_b;
    if eight % 8 != 0 {
        return Err(Error::ParityViolation);
    }
    Ok(eight / 8)
}

pub fn euler_char(bundle: &ConicBundle, curve: &CurveDescriptor, d: &NumClass) -> Result<i64> {
    let t = type_of(bundle, d)?;
    let b: Vec<(i64, usize)> = d.b.iter().map(|(p, c)| (c.value, p.degree())).collect();
    euler_char_for_type(t.d, t.e, curve.genus as i64, bundle.l() as i64, &b)
}

/// Re-express the coefficient at P on the other component of the fiber.
pub fn swap_component(bundle: &ConicBundle, d: &NumClass, point: &ClosedPoint) -> Result<NumClass> {
    if !bundle.is_split(point) {
        return Err(Error::NotASplitFiber(point.label().to_string()));
    }
    let Some(c) = d.b.get(point).copied() else {
        return Ok(d.clone());
    };
    if c.value == 0 {
        return Ok(d.clone());
    }
    let mut out = d.clone();
    out.a += c.value * point.degree() as i64;
    out.b.insert(
        point.clone(),
        BCoeff {
            value: -c.value,
            side: c.side.flip(),
        },
    );
    Ok(out)
}

/// Swap every negative coefficient so that all b_P ≥ 0.
pub fn normalize(bundle: &ConicBundle, d: &NumClass) -> Result<NumClass> {
    let mut out = d.clone();
    let negative: Vec<ClosedPoint> = d
        .b
        .iter()
        .filter(|(_, c)| c.value < 0)
        .map(|(p, _)| p.clone())
        .collect();
    for p in negative {
        out = swap_component(bundle, &out, &p)?;
    }
    Ok(out)
}

/// Canonical-basis classes of type (d, e) with |b_P| ≤ d/2 at every split
/// point (so that Y·E_P ≥ 0 and Y·E′_P ≥ 0 are both possible).
pub fn classes_of_type(bundle: &ConicBundle, d: i64, e: i64) -> Vec<NumClass> {
    let splits: Vec<ClosedPoint> = bundle.split_fibers().map(|s| s.point.clone()).collect();
    let bound = if d % 2 == 0 { d / 2 } else { 0 };
    let l = bundle.l() as i64;
    let mut out = Vec::new();
    let mut bs = vec![-bound; splits.len()];
    loop {
        let weighted: i64 = bs
            .iter()
            .zip(&splits)
            .map(|(v, p)| v * p.degree() as i64)
            .sum();
        // e = (d/2) l + 2a + Σ b deg P
        let twice_rest = 2 * e - d * l - 2 * weighted;
        if d % 2 == 0 || l == 0 {
            if twice_rest % 4 == 0 {
                let a = twice_rest / 4;
                let mut c = NumClass::with_fiber_degree(d, a);
                for (v, p) in bs.iter().zip(&splits) {
                    c = c.with_b(p, *v, Side::E);
                }
                out.push(c);
            }
        }
        let mut i = 0;
        loop {
            if i == bs.len() {
                return out;
            }
            if bs[i] < bound {
                bs[i] += 1;
                break;
            }
            bs[i] = -bound;
            i += 1;
        }
    }
}

fn height(bundle: &ConicBundle, c: &NumClass) -> i64 {
    let (a, b) = c.canonical();
    let w: i64 = b.iter().map(|(p, v)| v * p.degree() as i64).sum();
    // e = (d/2) l + 2a + Σ b deg P; d·l is even whenever this is called
    (c.d * bundle.l() as i64) / 2 + 2 * a + w
}

/// Unordered splittings D = D1 + D2 into effective-candidate classes.
/// Fiber degrees are even unless l = 0, where any split of d is allowed.
pub fn decompositions(bundle: &ConicBundle, d: &NumClass) -> Vec<(NumClass, NumClass)> {
    let (_, bc) = d.canonical();
    let splits: Vec<ClosedPoint> = bundle.split_fibers().map(|s| s.point.clone()).collect();
    let total_e = height(bundle, d);
    let step = if bundle.l() == 0 { 1 } else { 2 };
    let mut out = Vec::new();
    let mut d1 = 0;
    while 2 * d1 <= d.d {
        let d2 = d.d - d1;
        let (r1, r2) = (d1 / 2, d2 / 2);
        let mut b1: Vec<i64> = splits.iter().map(|_| -r1).collect();
        'outer: loop {
            let ok = splits.iter().zip(&b1).all(|(p, v)| {
                let rest = bc.get(p).copied().unwrap_or(0) - v;
                rest.abs() <= r2
            });
            if ok {
                let mut c1 = NumClass::with_fiber_degree(d1, 0);
                let mut c2 = NumClass::with_fiber_degree(d2, 0);
                for (p, v) in splits.iter().zip(&b1) {
                    let total = bc.get(p).copied().unwrap_or(0);
                    c1 = c1.with_b(p, *v, Side::E);
                    c2 = c2.with_b(p, total - v, Side::E);
                }
                let (a_total, _) = d.canonical();
                let e1_base = height(bundle, &c1);
                let e2_base = height(bundle, &c2);
                // a1 + a2 = a_total, e1 = e1_base + 2 a1 ≥ 0, e2 = e2_base + 2 a2 ≥ 0
                let lo = (-e1_base).div_euclid(2) + ((-e1_base).rem_euclid(2) != 0) as i64;
                let hi = (e2_base + 2 * a_total).div_euclid(2);
                for a1 in lo..=hi {
                    let mut p1 = c1.clone();
                    p1.a = a1;
                    let mut p2 = c2.clone();
                    p2.a = a_total - a1;
                    if p1.is_zero() || p2.is_zero() {
                        continue;
                    }
                    debug_assert_eq!(height(bundle, &p1) + height(bundle, &p2), total_e);
                    if d1 == d2 && pair_key(&p1) > pair_key(&p2) {
                        continue;
                    }
                    let n1 = normalize(bundle, &p1).expect("split keys");
                    let n2 = normalize(bundle, &p2).expect("split keys");
                    out.push((n1, n2));
                }
            }
            let mut i = 0;
            loop {
                if i == b1.len() {
                    break 'outer;
                }
                if b1[i] < r1 {
                    b1[i] += 1;
                    break;
                }
                b1[i] = -r1;
                i += 1;
            }
        }
        d1 += step;
    }
    out
}

fn pair_key(c: &NumClass) -> (i64, Vec<i64>) {
    let (a, b) = c.canonical();
    (a, b.values().copied().collect())
}
