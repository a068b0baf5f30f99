//! Fixed-point decimals over big integers, used wherever a report shows an
//! approximation of an exact or irrational value.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// value · 10^(−digits)
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed {
    value: BigInt,
    digits: u32,
}

pub fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// Round num/den to the nearest integer, ties toward +∞.
pub fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (n, d) = if den.is_negative() {
        (-num, -den)
    } else {
        (num.clone(), den.clone())
    };
    let two = BigInt::from(2);
    (n * &two + &d).div_floor(&(d * &two))
}

impl Fixed {
    pub fn from_rational(r: &BigRational, digits: u32) -> Self {
        let num = r.numer() * pow10(digits);
        Fixed {
            value: round_div(&num, r.denom()),
            digits,
        }
    }

    pub fn from_int(v: &BigInt, digits: u32) -> Self {
        Fixed {
            value: v * pow10(digits),
            digits,
        }
    }

    pub fn from_raw(value: BigInt, digits: u32) -> Self {
        Fixed { value, digits }
    }

    pub fn raw(&self) -> &BigInt {
        &self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn one(digits: u32) -> Self {
        Fixed::from_int(&BigInt::one(), digits)
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        assert_eq!(self.digits, o.digits);
        Fixed::from_raw(&self.value + &o.value, self.digits)
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        assert_eq!(self.digits, o.digits);
        Fixed::from_raw(&self.value - &o.value, self.digits)
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        assert_eq!(self.digits, o.digits);
        Fixed::from_raw(
            round_div(&(&self.value * &o.value), &pow10(self.digits)),
            self.digits,
        )
    }

    pub fn div(&self, o: &Fixed) -> Fixed {
        assert_eq!(self.digits, o.digits);
        Fixed::from_raw(
            round_div(&(&self.value * pow10(self.digits)), &o.value),
            self.digits,
        )
    }

    pub fn pow(&self, mut e: u64) -> Fixed {
        let mut base = self.clone();
        let mut acc = Fixed::one(self.digits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(&self) -> Fixed {
        assert!(!self.value.is_negative());
        Fixed::from_raw((&self.value * pow10(self.digits)).sqrt(), self.digits)
    }

    pub fn abs(&self) -> Fixed {
        Fixed::from_raw(self.value.abs(), self.digits)
    }

    /// Round to fewer digits.
    pub fn round_to(&self, digits: u32) -> Fixed {
        if digits >= self.digits {
            return Fixed::from_raw(&self.value * pow10(digits - self.digits), digits);
        }
        Fixed::from_raw(
            round_div(&self.value, &pow10(self.digits - digits)),
            digits,
        )
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.value.clone(), pow10(self.digits))
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.round_to(self.digits.min(17)).to_string();
        s.parse().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.value.is_negative();
        let s = self.value.abs().to_string();
        let d = self.digits as usize;
        let padded = if s.len() <= d {
            format!("{}{}", "0".repeat(d + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = padded.split_at(padded.len() - d);
        if neg {
            write!(f, "-")?;
        }
        if d == 0 {
            write!(f, "{int}")
        } else {
            write!(f, "{int}.{frac}")
        }
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parse a plain decimal literal ("12", "-0.25", "1.5e-3") into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{ip}{fp}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - fp.len() as i32;
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(pow10(scale as u32));
    } else {
        r /= BigRational::from_integer(pow10((-scale) as u32));
    }
    Some(if neg { -r } else { r })
}

/// Exact rational to string "num/den" (or "num" for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
