//! Conic bundles a x² + b y² + c z² = 0 in P² × P¹ and their fibers.

use std::sync::Arc;

use serde::Serialize;

use crate::curve::{ClosedPoint, PointRepr};
use crate::error::{Error, Result};
use crate::gf::{factor_poly, FieldDesc, FieldElem, ResElem, ResidueField, UniPoly};

/// Binary form of degree l; index i holds the coefficient of s^{l−i} t^i.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<FieldElem>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<FieldElem>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form has at least one coefficient");
        BinaryForm { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm::new(vec![FieldElem::ZERO; degree + 1])
    }

    pub fn from_ints(field: &FieldDesc, coeffs: &[i64]) -> Self {
        BinaryForm::new(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: FieldElem, f: &FieldDesc) -> Self {
        BinaryForm::new(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &FieldDesc) -> Self {
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        BinaryForm::new(out)
    }

    /// f(1, t).
    pub fn dehomogenize(&self) -> UniPoly {
        UniPoly::new(self.coeffs.clone())
    }

    /// Value at P in κ(P); at ∞ this is f(0,1).
    pub fn eval_at(&self, point: &ClosedPoint, k: &ResidueField) -> ResElem {
        match point.repr() {
            PointRepr::Infinity => k.from_base(self.coeffs[self.degree()]),
            PointRepr::Finite(_) => k.from_poly(&self.dehomogenize()),
        }
    }

    /// Closed points where the form vanishes, with multiplicities.
    pub fn zeros(&self, field: &FieldDesc) -> Result<Vec<(ClosedPoint, u32)>> {
        let g = self.dehomogenize();
        if g.is_zero() {
            return Err(Error::SingularTotalSpace("a coefficient form is zero".into()));
        }
        let mut out = Vec::new();
        let at_inf = self.degree() - g.degree().unwrap_or(0);
        if at_inf > 0 {
            out.push((ClosedPoint::infinity(), at_inf as u32));
        }
        for (h, m) in factor_poly(field, &g)?.factors {
            out.push((ClosedPoint::finite_unchecked(field, h), m));
        }
        Ok(out)
    }

    pub fn format(&self, f: &FieldDesc) -> String {
        let l = self.degree();
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut mono = Vec::new();
            match l - i {
                0 => {}
                1 => mono.push("s".to_string()),
                k => mono.push(format!("s^{k}")),
            }
            match i {
                0 => {}
                1 => mono.push("t".to_string()),
                k => mono.push(format!("t^{k}")),
            }
            let m = mono.join("*");
            terms.push(if m.is_empty() {
                f.format(c)
            } else if c == FieldElem::ONE {
                m
            } else {
                format!("{}*{}", f.format(c), m)
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FiberClass {
    Smooth,
    SplitPair,
    NonSplitPair,
}

/// Coefficients of a linear form in x, y, z over κ(P).
pub type LineForm = [ResElem; 3];

/// A degenerate fiber. `vanishing` is the index (0,1,2 for a,b,c) of the
/// coefficient vanishing at the point; the fiber conic is β·w1² + γ·w2² in the
/// surviving coordinates (w1, w2) taken cyclically after it.
#[derive(Clone, Debug)]
pub struct SingularFiber {
    pub point: ClosedPoint,
    pub class: FiberClass,
    pub vanishing: usize,
    pub residue: ResidueField,
    pub beta: ResElem,
    pub gamma: ResElem,
    /// ρ with E_P: w1 = ρ·w2 and E′_P: w1 = −ρ·w2 (split fibers only).
    pub rho: Option<ResElem>,
}

impl SingularFiber {
    pub fn degree(&self) -> usize {
        self.point.degree()
    }

    /// Indices of (w0, w1, w2) in (x, y, z): w0 is the coordinate whose
    /// coefficient vanishes.
    pub fn coordinates(&self) -> [usize; 3] {
        let k = self.vanishing;
        [k, (k + 1) % 3, (k + 2) % 3]
    }

    /// (ℓ_P, ℓ′_P) for split fibers.
    pub fn line_forms(&self) -> Option<(LineForm, LineForm)> {
        let rho = self.rho.as_ref()?;
        let k = &self.residue;
        let [_, i1, i2] = self.coordinates();
        let mut l = [k.zero(), k.zero(), k.zero()];
        let mut lp = l.clone();
        l[i1] = k.one();
        l[i2] = k.neg(rho);
        lp[i1] = k.one();
        lp[i2] = rho.clone();
        Some((l, lp))
    }

    /// Slope of the named line: E_P (`prime = false`) is w1 = ρ w2.
    pub fn slope(&self, prime: bool) -> Option<ResElem> {
        let rho = self.rho.as_ref()?;
        Some(if prime {
            self.residue.neg(rho)
        } else {
            rho.clone()
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConicBundle {
    field: Arc<FieldDesc>,
    l: usize,
    forms: [BinaryForm; 3],
    singular: Vec<SingularFiber>,
}

fn classify_values(
    vals: &[ResElem; 3],
    k: &ResidueField,
) -> Result<(FiberClass, usize, ResElem, ResElem, Option<ResElem>)> {
    let zeros: Vec<usize> = (0..3).filter(|&i| k.is_zero(&vals[i])).collect();
    match zeros.as_slice() {
        [] => Ok((FiberClass::Smooth, 0, k.zero(), k.zero(), None)),
        [v] => {
            let beta = vals[(v + 1) % 3].clone();
            let gamma = vals[(v + 2) % 3].clone();
            let ratio = k.neg(&k.div(&gamma, &beta)?);
            if k.is_square(&ratio)? {
                let r = k.sqrt(&ratio).expect("square has a root");
                let nr = k.neg(&r);
                let rho = if k.lex_key(&r) <= k.lex_key(&nr) { r } else { nr };
                Ok((FiberClass::SplitPair, *v, beta, gamma, Some(rho)))
            } else {
                Ok((FiberClass::NonSplitPair, *v, beta, gamma, None))
            }
        }
        _ => Err(Error::NonReducedFiber("two coefficients vanish".into())),
    }
}

/// Validate (a, b, c) and build the bundle with its singular-fiber catalog.
pub fn validate_bundle(
    field: Arc<FieldDesc>,
    l: usize,
    a: BinaryForm,
    b: BinaryForm,
    c: BinaryForm,
) -> Result<ConicBundle> {
    let forms = [a, b, c];
    for form in &forms {
        if form.degree() != l {
            return Err(Error::FormDegree {
                expected: l,
                found: form.degree(),
            });
        }
        if form.is_zero() {
            return Err(Error::SingularTotalSpace("a coefficient form is zero".into()));
        }
    }
    let zero_sets: Vec<Vec<(ClosedPoint, u32)>> = forms
        .iter()
        .map(|f| f.zeros(&field))
        .collect::<Result<_>>()?;
    for i in 0..3 {
        for j in i + 1..3 {
            for (p, _) in &zero_sets[i] {
                if zero_sets[j].iter().any(|(q, _)| q == p) {
                    return Err(Error::NonReducedFiber(p.label().to_string()));
                }
            }
        }
    }
    for zs in &zero_sets {
        for (p, m) in zs {
            if *m > 1 {
                return Err(Error::SingularTotalSpace(format!(
                    "abc has a repeated zero at {}",
                    p.label()
                )));
            }
        }
    }
    let mut bundle = ConicBundle {
        field,
        l,
        forms,
        singular: Vec::new(),
    };
    let mut singular = Vec::new();
    for (p, _) in zero_sets.into_iter().flatten() {
        singular.push(bundle.fiber_data(&p)?);
    }
    singular.sort_by(|x, y| x.point.cmp(&y.point));
    bundle.singular = singular;
    Ok(bundle)
}

impl ConicBundle {
    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn forms(&self) -> &[BinaryForm; 3] {
        &self.forms
    }

    pub fn singular_fibers(&self) -> &[SingularFiber] {
        &self.singular
    }

    pub fn split_fibers(&self) -> impl Iterator<Item = &SingularFiber> {
        self.singular
            .iter()
            .filter(|s| s.class == FiberClass::SplitPair)
    }

    pub fn fiber(&self, point: &ClosedPoint) -> Option<&SingularFiber> {
        self.singular.iter().find(|s| &s.point == point)
    }

    pub fn is_split(&self, point: &ClosedPoint) -> bool {
        self.fiber(point)
            .is_some_and(|s| s.class == FiberClass::SplitPair)
    }

    /// True when the generic fiber has an F_q(t)-point, i.e. no fiber is a
    /// non-split pair.
    pub fn has_trivial_generic_fiber(&self) -> bool {
        self.singular
            .iter()
            .all(|s| s.class != FiberClass::NonSplitPair)
    }

    /// (a(P), b(P), c(P)) in κ(P).
    pub fn values_at(&self, point: &ClosedPoint, k: &ResidueField) -> [ResElem; 3] {
        [
            self.forms[0].eval_at(point, k),
            self.forms[1].eval_at(point, k),
            self.forms[2].eval_at(point, k),
        ]
    }

    fn fiber_data(&self, point: &ClosedPoint) -> Result<SingularFiber> {
        let k = point.residue_field(&self.field);
        let vals = self.values_at(point, &k);
        let (class, vanishing, beta, gamma, rho) = classify_values(&vals, &k)?;
        Ok(SingularFiber {
            point: point.clone(),
            class,
            vanishing,
            residue: k,
            beta,
            gamma,
            rho,
        })
    }

    pub fn bundle_json(&self) -> serde_json::Value {
        let f = &self.field;
        let fj = |b: &BinaryForm| {
            b.coeffs()
                .iter()
                .map(|&c| f.digits(c))
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "l": self.l,
            "a": fj(&self.forms[0]),
            "b": fj(&self.forms[1]),
            "c": fj(&self.forms[2]),
            "equation": format!(
                "({})x^2 + ({})y^2 + ({})z^2",
                self.forms[0].format(f),
                self.forms[1].format(f),
                self.forms[2].format(f)
            ),
        })
    }
}

pub fn classify_fiber(bundle: &ConicBundle, point: &ClosedPoint) -> FiberClass {
    if let Some(s) = bundle.fiber(point) {
        return s.class;
    }
    let k = point.residue_field(bundle.field());
    let vals = bundle.values_at(point, &k);
    classify_values(&vals, &k)
        .map(|c| c.0)
        .unwrap_or(FiberClass::Smooth)
}

pub fn singular_locus(bundle: &ConicBundle) -> &[SingularFiber] {
    bundle.singular_fibers()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::closed_points_up_to;
    use crate::gf::make_field;

    fn bundle(p: u32, l: usize, a: &[i64], b: &[i64], c: &[i64]) -> Result<ConicBundle> {
        let f = make_field(p, 1).unwrap();
        validate_bundle(
            f.clone(),
            l,
            BinaryForm::from_ints(&f, a),
            BinaryForm::from_ints(&f, b),
            BinaryForm::from_ints(&f, c),
        )
    }

    #[test]
    fn validation_examples() {
        let triv = bundle(3, 0, &[1], &[1], &[-1]).unwrap();
        assert!(triv.singular_fibers().is_empty());
        // a = t, b = s, c = s + t
        let b1 = bundle(3, 1, &[0, 1], &[1, 0], &[1, 1]).unwrap();
        assert_eq!(b1.singular_fibers().len(), 3);
        let err = bundle(3, 1, &[0, 1], &[0, 1], &[1, 0]).unwrap_err();
        assert!(matches!(err, Error::NonReducedFiber(_)));
        let err = bundle(3, 2, &[0, 0, 1], &[1, 0, 0], &[1, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::SingularTotalSpace(_)));
        assert!(matches!(
            bundle(3, 1, &[1], &[1, 0], &[1, 1]),
            Err(Error::FormDegree { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let f = make_field(3, 1).unwrap();
        let triv = bundle(3, 0, &[1], &[1], &[-1]).unwrap();
        let t = ClosedPoint::finite(&f, UniPoly::x()).unwrap();
        assert_eq!(classify_fiber(&triv, &t), FiberClass::Smooth);
        let b1 = bundle(3, 1, &[0, 1], &[1, 0], &[1, 1]).unwrap();
        assert_eq!(classify_fiber(&b1, &ClosedPoint::infinity()), FiberClass::NonSplitPair);
        let tp1 = ClosedPoint::finite(&f, UniPoly::from_ints(&f, &[1, 1])).unwrap();
        assert_eq!(classify_fiber(&b1, &tp1), FiberClass::SplitPair);
        let classes: Vec<FiberClass> = b1.singular_fibers().iter().map(|s| s.class).collect();
        assert_eq!(
            classes,
            vec![FiberClass::NonSplitPair, FiberClass::NonSplitPair, FiberClass::SplitPair]
        );
        let split = b1.fiber(&tp1).unwrap();
        let (l1, l2) = split.line_forms().unwrap();
        let k = &split.residue;
        // lines x - y and x + y, in that order
        assert_eq!(l1, [k.one(), k.neg(&k.one()), k.zero()]);
        assert_eq!(l2, [k.one(), k.one(), k.zero()]);
    }

    #[test]
    fn degree_two_singular_point() {
        // a = s^2 + t^2, b = st, c = s^2 - t^2
        let b = bundle(3, 2, &[1, 0, 1], &[0, 1, 0], &[1, 0, -1]).unwrap();
        let degs: usize = b.singular_fibers().iter().map(|s| s.degree()).sum();
        assert_eq!(degs, 6);
        assert_eq!(b.singular_fibers().iter().filter(|s| s.degree() == 2).count(), 1);
    }

    #[test]
    fn line_forms_kill_the_fiber_conic() {
        let b = bundle(3, 2, &[1, 0, -1], &[1, 0, 1], &[0, 1, 0]).unwrap();
        for s in b.split_fibers() {
            let k = &s.residue;
            for prime in [false, true] {
                let rho = s.slope(prime).unwrap();
                // substitute w1 = ρ w2, w2 = 1
                let val = k.add(&k.mul(&s.beta, &k.mul(&rho, &rho)), &s.gamma);
                assert!(k.is_zero(&val));
            }
        }
    }

    #[test]
    fn classification_is_scale_invariant() {
        let f = make_field(5, 1).unwrap();
        let b = bundle(5, 2, &[1, 0, -1], &[1, 0, 2], &[0, 1, 0]).unwrap();
        let pts = closed_points_up_to(&f, 2);
        for lam in 1..5 {
            let lam = f.from_int(lam);
            let [a, bb, c] = b.forms().clone();
            let scaled = validate_bundle(
                f.clone(),
                2,
                a.scale(lam, &f),
                bb.scale(lam, &f),
                c.scale(lam, &f),
            )
            .unwrap();
            for p in &pts {
                assert_eq!(classify_fiber(&b, p), classify_fiber(&scaled, p));
            }
        }
    }
}
