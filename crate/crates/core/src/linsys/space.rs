//! H⁰(X, O(D)) inside the ambient model, restriction to fiber components,
//! proportions and multiplicities.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::ambient::{conic_multiples, multiply_binary, Ambient};
use super::local::{FiberNf, LineChart};
use crate::bundle::{BinaryForm, ConicBundle, FiberClass};
use crate::curve::{closed_points_of_degree, ClosedPoint};
use crate::error::{Error, Result};
use crate::gf::linalg::{nullspace, rref, Echelon};
use crate::gf::{FieldDesc, FieldElem};
use crate::picard::{check_class, intersect, NumClass, Side};

/// A fiber component: a whole fiber, or one line of a split fiber.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Fiber(ClosedPoint),
    Line(ClosedPoint, Side),
}

impl Component {
    pub fn point(&self) -> &ClosedPoint {
        match self {
            Component::Fiber(p) | Component::Line(p, _) => p,
        }
    }

    /// Intersection with H.
    pub fn height(&self) -> i64 {
        match self {
            Component::Fiber(p) => 2 * p.degree() as i64,
            Component::Line(p, _) => p.degree() as i64,
        }
    }

    pub fn as_class(&self) -> NumClass {
        match self {
            Component::Fiber(p) => NumClass::new(0, p.degree() as i64),
            Component::Line(p, side) => NumClass::component(p, *side),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Component::Fiber(p) => format!("X_{}", p.label()),
            Component::Line(p, Side::E) => format!("E_{}", p.label()),
            Component::Line(p, Side::EPrime) => format!("E'_{}", p.label()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentSet {
    pub elements: BTreeSet<Component>,
}

impl ComponentSet {
    pub fn new<I: IntoIterator<Item = Component>>(items: I) -> Self {
        ComponentSet {
            elements: items.into_iter().collect(),
        }
    }

    pub fn height(&self) -> i64 {
        self.elements.iter().map(Component::height).sum()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_class(&self) -> NumClass {
        self.elements
            .iter()
            .fold(NumClass::new(0, 0), |acc, c| acc.add(&c.as_class()))
    }

    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(Component::label).collect()
    }
}

/// Every component of height ≤ h, in canonical order.
pub fn components_up_to(bundle: &ConicBundle, h: i64) -> Vec<Component> {
    let mut out = Vec::new();
    if h <= 0 {
        return out;
    }
    for m in 1..=(h / 2) as usize {
        for p in closed_points_of_degree(bundle.field(), m) {
            if !bundle.is_split(&p) {
                out.push(Component::Fiber(p));
            }
        }
    }
    for s in bundle.split_fibers() {
        if s.degree() as i64 <= h {
            out.push(Component::Line(s.point.clone(), Side::E));
            out.push(Component::Line(s.point.clone(), Side::EPrime));
        }
    }
    out.sort();
    out
}

/// A section of O(D), stored as its canonical ambient representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub class: NumClass,
    pub ambient: Ambient,
    pub coords: Vec<FieldElem>,
}

impl Section {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Coefficient binary form of each monomial, keyed by exponent vector.
    pub fn ambient_coeffs(&self) -> Vec<([u32; 3], BinaryForm)> {
        let w = self.ambient.tdeg() + 1;
        if self.ambient.width() == 0 {
            return Vec::new();
        }
        self.ambient
            .monos
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, BinaryForm::new(self.coords[i * w..(i + 1) * w].to_vec())))
            .collect()
    }

    pub fn to_json(&self, f: &FieldDesc) -> serde_json::Value {
        let terms: serde_json::Map<String, serde_json::Value> = self
            .ambient_coeffs()
            .into_iter()
            .filter(|(_, b)| !b.is_zero())
            .map(|(e, b)| {
                (
                    format!("x^{} y^{} z^{}", e[0], e[1], e[2]),
                    serde_json::Value::String(b.format(f)),
                )
            })
            .collect();
        serde_json::json!({ "class": self.class.to_json(), "ambient_coeffs": terms })
    }
}

/// Which part of a fiber a multiplicity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiberPart {
    E,
    EPrime,
    FullFiber,
}

#[derive(Clone, Debug)]
pub struct SectionSpace {
    bundle: ConicBundle,
    class: NumClass,
    ambient: Ambient,
    conic: Echelon,
    basis: Echelon,
}

/// Coefficient degree of the ambient model and the twist at each split point.
fn ambient_of(class: &NumClass) -> Ambient {
    let (a, b) = class.canonical();
    let extra: i64 = b.iter().map(|(p, v)| v.max(&0) * p.degree() as i64).sum();
    Ambient::new((class.d / 2) as usize, a + extra)
}

/// Vanishing order already imposed on a line by the ambient model.
fn base_order(class: &NumClass, p: &ClosedPoint, side: Side) -> usize {
    let b = class.b_on_e(p);
    match side {
        Side::E => (-b).max(0) as usize,
        Side::EPrime => b.max(0) as usize,
    }
}

pub fn section_space(bundle: &ConicBundle, d: &NumClass) -> Result<SectionSpace> {
    check_class(bundle, d)?;
    if d.d % 2 != 0 {
        return Err(Error::OddDegreeUnsupported(d.d));
    }
    if d.d < 0 {
        return Err(Error::EmptySpace(format!("fiber degree {} is negative", d.d)));
    }
    let f = bundle.field();
    let class = d.canonicalized();
    let ambient = ambient_of(&class);
    let n = ambient.width();
    let conic = conic_multiples(bundle, &ambient);
    let mut is_pivot = vec![false; n];
    for &p in &conic.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut rows: Vec<Vec<FieldElem>> = Vec::new();
    if n > 0 {
        for (p, c) in &class.b {
            let fiber = bundle.fiber(p).expect("checked split");
            let side = if c.value > 0 { Side::EPrime } else { Side::E };
            let k = c.value.unsigned_abs() as usize;
            let chart = LineChart::new(bundle, fiber, side, k, ambient.dprime, ambient.tdeg());
            rows.extend(chart.rows(&ambient, 0..k));
        }
    }
    let restricted: Vec<Vec<FieldElem>> = rows
        .iter()
        .map(|r| free.iter().map(|&c| r[c]).collect())
        .collect();
    let kernel = nullspace(&restricted, free.len(), f);
    let embedded: Vec<Vec<FieldElem>> = kernel
        .into_iter()
        .map(|v| {
            let mut w = vec![FieldElem::ZERO; n];
            for (x, &c) in v.into_iter().zip(&free) {
                w[c] = x;
            }
            w
        })
        .collect();
    let basis = rref(embedded, n, f);
    Ok(SectionSpace {
        bundle: bundle.clone(),
        class,
        ambient,
        conic,
        basis,
    })
}

impl SectionSpace {
    pub fn bundle(&self) -> &ConicBundle {
        &self.bundle
    }

    pub fn class(&self) -> &NumClass {
        &self.class
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn field(&self) -> &FieldDesc {
        self.bundle.field()
    }

    pub fn basis_vectors(&self) -> &[Vec<FieldElem>] {
        &self.basis.rows
    }

    pub fn basis(&self) -> Vec<Section> {
        self.basis
            .rows
            .iter()
            .map(|r| self.wrap(r.clone()))
            .collect()
    }

    fn wrap(&self, coords: Vec<FieldElem>) -> Section {
        Section {
            class: self.class.clone(),
            ambient: self.ambient.clone(),
            coords,
        }
    }

    /// Σ c_i·basis_i.
    pub fn combine(&self, c: &[FieldElem]) -> Vec<FieldElem> {
        let f = self.field();
        let mut v = vec![FieldElem::ZERO; self.ambient.width()];
        for (row, &x) in self.basis.rows.iter().zip(c) {
            crate::gf::linalg::axpy(&mut v, x, row, f);
        }
        v
    }

    pub fn section(&self, c: &[FieldElem]) -> Section {
        self.wrap(self.combine(c))
    }

    /// Coordinates of the section with the given enumeration index Σ c_i q^i.
    pub fn coords_of_index(&self, mut idx: u64) -> Vec<FieldElem> {
        let q = self.field().q() as u64;
        (0..self.dim())
            .map(|_| {
                let c = FieldElem((idx % q) as u32);
                idx /= q;
                c
            })
            .collect()
    }

    /// Reduce an ambient vector modulo conic multiples; returns its section coordinates
    /// when it lies in H⁰(D).
    pub fn coordinates_of(&self, v: &[FieldElem]) -> Option<Vec<FieldElem>> {
        let f = self.field();
        let mut w = v.to_vec();
        self.conic.reduce(&mut w, f);
        let c = self.basis.coordinates(&w);
        let mut back = self.combine(&c);
        for (x, y) in back.iter_mut().zip(&w) {
            *x = f.sub(*x, *y);
        }
        back.iter().all(|x| x.is_zero()).then_some(c)
    }

    pub fn canonical_rep(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let mut w = v.to_vec();
        self.conic.reduce(&mut w, self.field());
        w
    }

    /// Linear forms on ambient coordinates cutting out the sections vanishing on `comp`.
    pub fn ambient_rows(&self, comp: &Component) -> Result<Vec<Vec<FieldElem>>> {
        let amb = &self.ambient;
        if amb.width() == 0 {
            return Ok(Vec::new());
        }
        match comp {
            Component::Fiber(p) => {
                if self.bundle.is_split(p) {
                    let mut rows = self.ambient_rows(&Component::Line(p.clone(), Side::E))?;
                    rows.extend(self.ambient_rows(&Component::Line(p.clone(), Side::EPrime))?);
                    Ok(rows)
                } else {
                    let nf = FiberNf::new(&self.bundle, p, amb.dprime, amb.tdeg());
                    Ok(nf.rows(amb))
                }
            }
            Component::Line(p, side) => {
                let fiber = self
                    .bundle
                    .fiber(p)
                    .filter(|s| s.class == FiberClass::SplitPair)
                    .ok_or_else(|| Error::NotASplitFiber(p.label().to_string()))?;
                let o = base_order(&self.class, p, *side);
                let chart =
                    LineChart::new(&self.bundle, fiber, *side, o + 1, amb.dprime, amb.tdeg());
                Ok(chart.rows(amb, o..o + 1))
            }
        }
    }

    /// The same conditions in section coordinates.
    pub fn section_rows(&self, comp: &Component) -> Result<Vec<Vec<FieldElem>>> {
        let f = self.field();
        let rows = self.ambient_rows(comp)?;
        let out = rows
            .iter()
            .map(|r| {
                self.basis
                    .rows
                    .iter()
                    .map(|b| {
                        r.iter().zip(b).fold(FieldElem::ZERO, |acc, (&x, &y)| {
                            if x.is_zero() || y.is_zero() {
                                acc
                            } else {
                                f.add(acc, f.mul(x, y))
                            }
                        })
                    })
                    .collect()
            })
            .filter(|r: &Vec<FieldElem>| r.iter().any(|x| !x.is_zero()))
            .collect();
        Ok(out)
    }

    /// Basis (in section coordinates) of the sections vanishing on every element of S.
    pub fn kernel(&self, s: &ComponentSet) -> Result<Vec<Vec<FieldElem>>> {
        let mut rows = Vec::new();
        for c in &s.elements {
            rows.extend(self.section_rows(c)?);
        }
        Ok(nullspace(&rows, self.dim(), self.field()))
    }

    /// dim H⁰ of D restricted to the component, i.e. the rank the restriction map
    /// would have if it were surjective.
    pub fn restriction_target(&self, comp: &Component) -> i64 {
        let d = self.class.d;
        let dprime = d / 2;
        match comp {
            Component::Fiber(p) => (d + 1) * p.degree() as i64,
            Component::Line(p, side) => {
                let b = self.class.b_on_e(p);
                let deg = match side {
                    Side::E => dprime - b,
                    Side::EPrime => dprime + b,
                };
                (deg + 1).max(0) * p.degree() as i64
            }
        }
    }

    /// Target dimension for a set, counting the meeting point of E_P and E′_P once.
    pub fn restriction_target_set(&self, s: &ComponentSet) -> i64 {
        let mut total: i64 = s.elements.iter().map(|c| self.restriction_target(c)).sum();
        for c in &s.elements {
            if let Component::Line(p, Side::E) = c {
                if s.elements.contains(&Component::Line(p.clone(), Side::EPrime)) {
                    total -= p.degree() as i64;
                }
            }
        }
        total
    }
}

fn q_power(q: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        BigRational::one() / num_traits::pow(base, (-e) as usize)
    }
}

/// #Ker φ_S / q^{dim}.
pub fn proportion_exact(space: &SectionSpace, s: &ComponentSet) -> Result<BigRational> {
    let k = space.kernel(s)?.len() as i64;
    Ok(q_power(space.bundle.q(), k - space.dim() as i64))
}

/// The product of the independent local factors.
pub fn proportion_product(
    bundle: &ConicBundle,
    d: &NumClass,
    s: &ComponentSet,
) -> Result<BigRational> {
    let q = bundle.q();
    let dd = d.d;
    let mut exp = 0i64;
    for c in &s.elements {
        let m = c.point().degree() as i64;
        match c {
            Component::Fiber(p) => match bundle.fiber(p).map(|f| f.class) {
                None | Some(FiberClass::Smooth) => exp -= m * (dd + 1),
                Some(FiberClass::NonSplitPair) => exp -= m * (dd + 2),
                Some(FiberClass::SplitPair) => {
                    for side in [Side::E, Side::EPrime] {
                        let dp = intersect(bundle, d, &NumClass::component(p, side))? / m;
                        exp -= m * (dp + 1);
                    }
                }
            },
            Component::Line(p, side) => {
                let dp = intersect(bundle, d, &NumClass::component(p, *side))? / m;
                exp -= m * (dp + 1);
            }
        }
    }
    Ok(q_power(q, exp))
}

/// Multiplicity of a fiber component in div(s).
pub fn component_multiplicity(
    space: &SectionSpace,
    s: &Section,
    point: &ClosedPoint,
    part: FiberPart,
) -> Result<usize> {
    if s.is_zero() {
        return Err(Error::ZeroSection);
    }
    let bundle = &space.bundle;
    let amb = &s.ambient;
    match part {
        FiberPart::E | FiberPart::EPrime => {
            let side = if part == FiberPart::E { Side::E } else { Side::EPrime };
            let fiber = bundle
                .fiber(point)
                .filter(|f| f.class == FiberClass::SplitPair)
                .ok_or_else(|| Error::NotASplitFiber(point.label().to_string()))?;
            // H is nef, so (div s − jE)·H ≥ 0 bounds j
            let bound = (amb.dprime * bundle.l() + 2 * amb.tdeg()) / point.degree() + 2;
            let chart = LineChart::new(bundle, fiber, side, bound, amb.dprime, amb.tdeg());
            let v = chart
                .valuation(amb, &s.coords)
                .expect("a nonzero section has finite valuation");
            Ok(v - base_order(&s.class, point, side))
        }
        FiberPart::FullFiber => {
            if bundle.is_split(point) {
                let e = component_multiplicity(space, s, point, FiberPart::E)?;
                let ep = component_multiplicity(space, s, point, FiberPart::EPrime)?;
                return Ok(e.min(ep));
            }
            Ok(fiber_divisibility(bundle, amb, &s.coords, point))
        }
    }
}

/// Largest j with v ∈ p^j·(ambient of coefficient degree A − j·deg P) + conic multiples.
fn fiber_divisibility(
    bundle: &ConicBundle,
    amb: &Ambient,
    v: &[FieldElem],
    point: &ClosedPoint,
) -> usize {
    let f = bundle.field();
    let m = point.degree() as i64;
    let p = point.homogeneous();
    let conic = conic_multiples(bundle, amb);
    let mut j = 0usize;
    loop {
        let next = j as i64 + 1;
        let low = Ambient::new(amb.dprime, amb.coef - next * m);
        if low.coef < 0 {
            return j;
        }
        let mut rows = conic.rows.clone();
        let mut pj = vec![FieldElem::ONE];
        for _ in 0..next {
            pj = BinaryForm::new(pj).mul(&BinaryForm::new(p.clone()), f).coeffs().to_vec();
        }
        for c in 0..low.width() {
            let mut e = vec![FieldElem::ZERO; low.width()];
            e[c] = FieldElem::ONE;
            let (_, w) = multiply_binary(f, &low, &e, &pj);
            rows.push(w);
        }
        let span = rref(rows, amb.width(), f);
        if !span.contains(v, f) {
            return j;
        }
        j += 1;
    }
}
