//! Exact constants of the asymptotic count: a(d), K(b̄), K(d), the leading
//! coefficient and the predicted main term, plus the number-field analogue.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use crate::bundle::{ConicBundle, FiberClass};
use crate::curve::{zeta_value, ClosedPoint, CurveDescriptor};
use crate::decimal::{parse_decimal, rational_string, Fixed};
use crate::error::{Error, Result};
use crate::linsys::{prime_count, ScanOptions};

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// u + v·√q with exact rational u, v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtQRational {
    q: u64,
    u: BigRational,
    v: BigRational,
}

impl SqrtQRational {
    pub fn new(q: u64, u: BigRational, v: BigRational) -> Self {
        let r = q.sqrt();
        if r * r == q {
            // √q is rational: fold v into u
            let u = u + v * rational(r as i64);
            return SqrtQRational { q, u, v: BigRational::zero() };
        }
        SqrtQRational { q, u, v }
    }

    pub fn rational(q: u64, u: BigRational) -> Self {
        SqrtQRational::new(q, u, BigRational::zero())
    }

    pub fn one(q: u64) -> Self {
        SqrtQRational::rational(q, BigRational::one())
    }

    pub fn zero(q: u64) -> Self {
        SqrtQRational::rational(q, BigRational::zero())
    }

    /// √q^k for any integer k.
    pub fn sqrt_q_pow(q: u64, k: i64) -> Self {
        let base = rational(q as i64);
        let half = k.div_euclid(2);
        let p = if half >= 0 {
            num_traits::pow(base, half as usize)
        } else {
            BigRational::one() / num_traits::pow(base, (-half) as usize)
        };
        if k.rem_euclid(2) == 0 {
            SqrtQRational::rational(q, p)
        } else {
            SqrtQRational::new(q, BigRational::zero(), p)
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn u(&self) -> &BigRational {
        &self.u
    }

    pub fn v(&self) -> &BigRational {
        &self.v
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.q, o.q);
        SqrtQRational::new(self.q, &self.u + &o.u, &self.v + &o.v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        SqrtQRational::new(self.q, -&self.u, -&self.v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.q, o.q);
        let q = rational(self.q as i64);
        SqrtQRational::new(
            self.q,
            &self.u * &o.u + &self.v * &o.v * q,
            &self.u * &o.v + &self.v * &o.u,
        )
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        SqrtQRational::new(self.q, &self.u * r, &self.v * r)
    }

    pub fn inv(&self) -> Result<Self> {
        let q = rational(self.q as i64);
        let norm = &self.u * &self.u - &self.v * &self.v * q;
        if norm.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(SqrtQRational::new(self.q, &self.u / &norm, -&self.v / &norm))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn signum(&self) -> i32 {
        let su = sign(&self.u);
        let sv = sign(&self.v);
        if su == 0 || sv == 0 || su == sv {
            return if su != 0 { su } else { sv };
        }
        let lhs = &self.u * &self.u;
        let rhs = &self.v * &self.v * rational(self.q as i64);
        if lhs > rhs {
            su
        } else if lhs < rhs {
            sv
        } else {
            0
        }
    }

    pub fn to_fixed(&self, digits: u32) -> Fixed {
        let guard = digits + 10;
        let root = Fixed::from_int(&BigInt::from(self.q), guard).sqrt();
        let x = Fixed::from_rational(&self.u, guard)
            .add(&Fixed::from_rational(&self.v, guard).mul(&root));
        x.round_to(digits)
    }

    pub fn to_json(&self, digits: u32) -> serde_json::Value {
        serde_json::json!({
            "exact": self.to_string(),
            "u": rational_string(&self.u),
            "v": rational_string(&self.v),
            "decimal": self.to_fixed(digits).to_string(),
            "precision": digits,
        })
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for SqrtQRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return f.write_str(&rational_string(&self.u));
        }
        let v = format!("({})*sqrt({})", rational_string(&self.v), self.q);
        if self.u.is_zero() {
            f.write_str(&v)
        } else {
            write!(f, "{} + {}", rational_string(&self.u), v)
        }
    }
}

/// Degrees of the non-split (C¹) and split (C²) singular points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub q: u64,
    pub c1: Vec<usize>,
    pub c2: Vec<usize>,
}

impl SingularProfile {
    pub fn of(bundle: &ConicBundle) -> Self {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for s in bundle.singular_fibers() {
            match s.class {
                FiberClass::NonSplitPair => c1.push(s.degree()),
                FiberClass::SplitPair => c2.push(s.degree()),
                FiberClass::Smooth => {}
            }
        }
        SingularProfile { q: bundle.q(), c1, c2 }
    }

    pub fn smooth(q: u64) -> Self {
        SingularProfile { q, c1: Vec::new(), c2: Vec::new() }
    }
}

/// 1 − q^{−k}
fn one_minus(q: u64, k: i64) -> BigRational {
    let p = num_traits::pow(rational(q as i64), k.unsigned_abs() as usize);
    let x = if k >= 0 { BigRational::one() / p } else { p };
    BigRational::one() - x
}

pub fn a_const(q: u64, g: i64, l: i64, d: i64) -> SqrtQRational {
    let half = d / 2 + 1;
    SqrtQRational::sqrt_q_pow(q, (d + 1) * (2 - 2 * g) - l * (half * half - 1))
}

/// K(b̄) for a profile, with b̄ listed in the order of `profile.c2`.
pub fn k_bar_profile(profile: &SingularProfile, d: i64, bbar: &[i64]) -> Result<BigRational> {
    if bbar.len() != profile.c2.len() {
        return Err(Error::BundleMismatch(format!(
            "{} coefficients for {} split points",
            bbar.len(),
            profile.c2.len()
        )));
    }
    let q = profile.q;
    let dp = d / 2;
    let mut k = BigRational::one();
    for &m in &profile.c1 {
        let m = m as i64;
        k *= one_minus(q, m * (d + 2)) / one_minus(q, m * (d + 1));
    }
    for (&m, &b) in profile.c2.iter().zip(bbar) {
        let m = m as i64;
        let bound = dp / m;
        if b.abs() > bound {
            return Err(Error::BOutOfRange {
                point: format!("degree {m}"),
                value: b,
                bound,
            });
        }
        k *= one_minus(q, m * (dp - b + 1)) * one_minus(q, m * (dp + b + 1))
            / one_minus(q, m * (d + 1));
    }
    Ok(k)
}

/// K(b̄) with b̄ keyed by split point.
pub fn k_bar(
    bundle: &ConicBundle,
    d: i64,
    bbar: &std::collections::BTreeMap<ClosedPoint, i64>,
) -> Result<BigRational> {
    for p in bbar.keys() {
        if !bundle.is_split(p) {
            return Err(Error::NotASplitFiber(p.label().to_string()));
        }
    }
    let profile = SingularProfile::of(bundle);
    let values: Vec<i64> = bundle
        .split_fibers()
        .map(|s| bbar.get(&s.point).copied().unwrap_or(0))
        .collect();
    k_bar_profile(&profile, d, &values)
}

/// K(d) = Σ_b̄ K(b̄) / √q^{Σ b_P² deg P}, summed literally over the box of tuples.
pub fn k_const_profile(profile: &SingularProfile, d: i64) -> SqrtQRational {
    let q = profile.q;
    let dp = d / 2;
    let bounds: Vec<i64> = profile.c2.iter().map(|&m| dp / m as i64).collect();
    let mut b: Vec<i64> = bounds.iter().map(|x| -x).collect();
    let mut total = SqrtQRational::zero(q);
    loop {
        let kb = k_bar_profile(profile, d, &b).expect("tuple within bounds");
        let weight: i64 = b.iter().zip(&profile.c2).map(|(v, &m)| v * v * m as i64).sum();
        total = total.add(&SqrtQRational::sqrt_q_pow(q, -weight).scale(&kb));
        let mut i = 0;
        loop {
            if i == b.len() {
                return total;
            }
            if b[i] < bounds[i] {
                b[i] += 1;
                break;
            }
            b[i] = -bounds[i];
            i += 1;
        }
    }
}

/// The same constant evaluated as a product of per-point sums.
pub fn k_const_factored(profile: &SingularProfile, d: i64) -> SqrtQRational {
    let q = profile.q;
    let dp = d / 2;
    let mut total = SqrtQRational::one(q);
    for &m in &profile.c1 {
        let m = m as i64;
        let f = one_minus(q, m * (d + 2)) / one_minus(q, m * (d + 1));
        total = total.scale(&f);
    }
    for &m in &profile.c2 {
        let m = m as i64;
        let mut local = SqrtQRational::zero(q);
        for b in -(dp / m)..=(dp / m) {
            let f = one_minus(q, m * (dp - b + 1)) * one_minus(q, m * (dp + b + 1))
                / one_minus(q, m * (d + 1));
            local = local.add(&SqrtQRational::sqrt_q_pow(q, -b * b * m).scale(&f));
        }
        total = total.mul(&local);
    }
    total
}

pub fn k_const(bundle: &ConicBundle, d: i64) -> SqrtQRational {
    k_const_profile(&SingularProfile::of(bundle), d)
}

fn check_even(d: i64) -> Result<()> {
    if d <= 0 || d % 2 != 0 {
        Err(Error::OddDegreeUnsupported(d))
    } else {
        Ok(())
    }
}

/// J(C)·K(d)·a(d) / ((q − 1)·ζ_C(d + 1)).
pub fn leading_coeff_profile(
    profile: &SingularProfile,
    l: i64,
    curve: &CurveDescriptor,
    d: i64,
) -> Result<SqrtQRational> {
    check_even(d)?;
    let q = profile.q;
    let zeta = zeta_value(curve, q, d + 1)?;
    let k = k_const_profile(profile, d);
    let a = a_const(q, curve.genus as i64, l, d);
    let denom = rational(q as i64 - 1) * zeta;
    Ok(k.mul(&a).scale(&(rational(curve.jacobian as i64) / denom)))
}

pub fn leading_coeff(bundle: &ConicBundle, curve: &CurveDescriptor, d: i64) -> Result<SqrtQRational> {
    leading_coeff_profile(&SingularProfile::of(bundle), bundle.l() as i64, curve, d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub main: SqrtQRational,
    pub error_scale: SqrtQRational,
}

pub fn predict(bundle: &ConicBundle, curve: &CurveDescriptor, d: i64, e: i64) -> Result<Prediction> {
    let lc = leading_coeff(bundle, curve, d)?;
    let q = bundle.q();
    Ok(Prediction {
        main: lc.mul(&SqrtQRational::sqrt_q_pow(q, (d + 1) * e)),
        error_scale: SqrtQRational::sqrt_q_pow(q, d * e),
    })
}

/// A decimal literal read exactly; accepts JSON numbers or strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalInput(pub BigRational);

impl<'de> Deserialize<'de> for DecimalInput {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("expected a decimal number")),
        };
        parse_decimal(&text)
            .map(DecimalInput)
            .ok_or_else(|| serde::de::Error::custom(format!("not a decimal: {text}")))
    }
}

impl Serialize for DecimalInput {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldInputs {
    pub r: u32,
    pub s: u32,
    pub disc_norm: DecimalInput,
    pub class_number: u64,
    pub regulator: DecimalInput,
    pub roots_of_unity: u64,
    pub zeta_at: DecimalInput,
    pub vr: DecimalInput,
    pub vc: DecimalInput,
    pub hx: DecimalInput,
    #[serde(default)]
    pub primes1: Vec<u64>,
    #[serde(default)]
    pub primes2: Vec<u64>,
}

/// π by Machin's formula.
pub fn pi_fixed(digits: u32) -> Fixed {
    let guard = digits + 10;
    let atan_inv = |x: i64| {
        let one = Fixed::one(guard);
        let xf = Fixed::from_int(&BigInt::from(x), guard);
        let x2 = xf.mul(&xf);
        let mut term = one.div(&xf);
        let mut sum = term.clone();
        let mut k = 1i64;
        loop {
            term = term.div(&x2);
            if term.is_zero() {
                break;
            }
            let t = term.div(&Fixed::from_int(&BigInt::from(2 * k + 1), guard));
            sum = if k % 2 == 1 { sum.sub(&t) } else { sum.add(&t) };
            k += 1;
        }
        sum
    };
    let sixteen = Fixed::from_int(&BigInt::from(16), guard);
    let four = Fixed::from_int(&BigInt::from(4), guard);
    sixteen
        .mul(&atan_inv(5))
        .sub(&four.mul(&atan_inv(239)))
        .round_to(digits)
}

fn fixed_pow_int(x: &Fixed, k: i64) -> Fixed {
    if k >= 0 {
        x.pow(k as u64)
    } else {
        Fixed::one(x.digits()).div(&x.pow((-k) as u64))
    }
}

/// √N^k in fixed point.
fn sqrt_norm_pow(n: u64, k: i64, digits: u32) -> Fixed {
    let nf = Fixed::from_int(&BigInt::from(n), digits);
    let whole = fixed_pow_int(&nf, k.div_euclid(2));
    if k.rem_euclid(2) == 1 {
        whole.mul(&nf.sqrt())
    } else {
        whole
    }
}

/// K(X, L, d) over the split primes, with b ranging over [−⌊d′/Nw⌋, ⌊d′/Nw⌋].
pub fn number_field_k(inputs: &NumberFieldInputs, d: i64, digits: u32) -> Fixed {
    let guard = digits + 20;
    let dp = d / 2;
    let frac = |n: u64, k: i64| one_minus(n, k);
    let mut base = BigRational::one();
    for &n in &inputs.primes1 {
        base *= frac(n, d + 2) / frac(n, d + 1);
    }
    let mut total = Fixed::from_rational(&base, guard);
    for &n in &inputs.primes2 {
        let bound = dp / n as i64;
        let mut local = Fixed::from_int(&BigInt::zero(), guard);
        for b in -bound..=bound {
            let f = frac(n, dp + b + 1) * frac(n, dp - b + 1) / frac(n, d + 1);
            let w = sqrt_norm_pow(n, b * b, guard);
            local = local.add(&Fixed::from_rational(&f, guard).div(&w));
        }
        total = total.mul(&local);
    }
    total.round_to(digits)
}

/// S(X, L, d), the conjectural leading coefficient for points on a conic over L.
pub fn number_field_leading(inputs: &NumberFieldInputs, d: i64, digits: u32) -> Result<Fixed> {
    check_even(d)?;
    let positive = [
        &inputs.disc_norm,
        &inputs.regulator,
        &inputs.zeta_at,
        &inputs.vr,
        &inputs.vc,
        &inputs.hx,
    ];
    if positive.iter().any(|x| !x.0.is_positive())
        || inputs.class_number == 0
        || inputs.roots_of_unity == 0
        || inputs.r + 2 * inputs.s == 0
        || inputs.primes1.iter().chain(&inputs.primes2).any(|&n| n < 2)
    {
        return Err(Error::ConfigError {
            path: "number_field".into(),
            reason: "all inputs must be positive".into(),
        });
    }
    let g = digits + 20;
    let fx = |r: &BigRational| Fixed::from_rational(r, g);
    let fi = |n: i64| Fixed::from_int(&BigInt::from(n), g);
    let k = number_field_k(inputs, d, g);
    let hx_exp = d * d / 4 + d;
    let pi = pi_fixed(g);
    let two = fi(2);
    let inner = two
        .pow(inputs.r as u64)
        .mul(&two.mul(&pi).pow(inputs.s as u64))
        .div(&fx(&inputs.disc_norm.0).sqrt());
    let units = inputs.r as i64 + inputs.s as i64 - 1;
    let s = k
        .div(&fx(&inputs.hx.0).pow(hx_exp as u64))
        .mul(&fi(d))
        .mul(&fx(&inputs.vr.0).pow(inputs.r as u64))
        .mul(&fx(&inputs.vc.0).pow(inputs.s as u64))
        .mul(&fixed_pow_int(&fi(d + 1), units))
        .mul(&inner.pow((d + 1) as u64))
        .mul(&fi(inputs.class_number as i64))
        .mul(&fx(&inputs.regulator.0))
        .div(&fi(inputs.roots_of_unity as i64))
        .div(&fx(&inputs.zeta_at.0));
    Ok(s.round_to(digits))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub d: i64,
    pub e: i64,
    pub predicted: serde_json::Value,
    pub enumerated_mf: u128,
    pub enumerated_m: u128,
    pub ratio: Fixed,
}

/// Predicted main term against exhaustive counts, one row per e.
pub fn compare_table(
    bundle: &ConicBundle,
    curve: &CurveDescriptor,
    d: i64,
    e_list: &[i64],
    opts: &ScanOptions,
    digits: u32,
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &e in e_list {
        let pred = predict(bundle, curve, d, e)?;
        let count = prime_count(bundle, d, e, opts)?;
        let g = digits + 10;
        let main = pred.main.to_fixed(g);
        let ratio = if main.is_zero() {
            Fixed::from_int(&BigInt::zero(), digits)
        } else {
            Fixed::from_int(&BigInt::from(count.prime), g)
                .div(&main)
                .round_to(digits)
        };
        rows.push(CompareRow {
            d,
            e,
            predicted: pred.main.to_json(digits),
            enumerated_mf: count.fiberfree,
            enumerated_m: count.prime,
            ratio,
        });
    }
    Ok(rows)
}
