//! High-precision reals, certified (midpoint, radius) values and small
//! complex helpers on top of MPFR.
//!
//! All error radii are kept in a separate low-precision float that is
//! rounded upward on every operation, so the radius never under-reports
//! the accumulated error.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Working precision in bits.
pub type Prec = u32;

/// Default working precision.
pub const DEFAULT_PREC: Prec = 256;

/// Precision of error radii. They only need a few correct bits.
const RAD_PREC: Prec = 64;

pub fn float(prec: Prec, v: impl Into<f64>) -> Float {
    Float::with_val(prec, v.into())
}

pub fn int_to_float(prec: Prec, v: &Integer) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: Prec) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// The golden ratio (1 + sqrt 5) / 2 at the requested precision.
pub fn golden(prec: Prec) -> Float {
    let s = Float::with_val(prec, 5).sqrt();
    (s + 1u32) / 2u32
}

/// Unit roundoff 2^(1 - prec).
pub fn ulp(prec: Prec) -> Float {
    Float::with_val(RAD_PREC, 1) >> (prec as i32 - 1)
}

/// Parses a decimal string, or the keyword `golden`.
pub fn parse_real(prec: Prec, s: &str) -> Result<Float> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("golden") || s.eq_ignore_ascii_case("phi") {
        return Ok(golden(prec));
    }
    let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    let v = Float::with_val(prec, parsed);
    if !v.is_finite() {
        return Err(Error::Parse(format!("{s:?} is not finite")));
    }
    Ok(v)
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    x.to_string_radix(10, Some(digits))
}

/// Number of decimal digits that a precision can faithfully carry.
pub fn decimal_digits(prec: Prec) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
}

fn rad(v: impl Into<f64>) -> Float {
    Float::with_val(RAD_PREC, v.into())
}

fn rad_of(x: &Float) -> Float {
    Float::with_val_round(RAD_PREC, &*x.as_abs(), Round::Up).0
}

fn add_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a + b, Round::Up).0
}

fn mul_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a * b, Round::Up).0
}

fn div_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a / b, Round::Up).0
}

/// A value together with an absolute error bound: the true quantity lies in
/// `[value - error, value + error]`.
#[derive(Clone, Debug)]
pub struct CertifiedReal {
    value: Float,
    error: Float,
}

impl CertifiedReal {
    /// A value with the given error radius. Negative radii are clamped to
    /// their absolute value.
    pub fn new(value: Float, error: &Float) -> Self {
        Self { value, error: rad_of(error) }
    }

    pub fn exact(value: Float) -> Self {
        Self { value, error: rad(0.0) }
    }

    /// A freshly rounded value: radius of one unit roundoff.
    pub fn rounded(value: Float) -> Self {
        let e = mul_up(&rad_of(&value), &ulp(value.prec()));
        Self { value, error: e }
    }

    pub fn zero(prec: Prec) -> Self {
        Self::exact(Float::new(prec))
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn error(&self) -> &Float {
        &self.error
    }

    pub fn prec(&self) -> Prec {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn error_f64(&self) -> f64 {
        self.error.to_f64()
    }

    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.value - &self.error, Round::Down).0
    }

    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.value + &self.error, Round::Up).0
    }

    /// Widens the radius by `extra`.
    pub fn widen(mut self, extra: &Float) -> Self {
        self.error = add_up(&self.error, &rad_of(extra));
        self
    }

    /// True when `x` is inside the enclosure.
    pub fn contains(&self, x: &Float) -> bool {
        let d = Float::with_val(self.prec(), x - &self.value);
        (*d.as_abs()).partial_cmp(&self.error).map_or(false, |o| o != Ordering::Greater)
    }

    /// True if the two enclosures intersect.
    pub fn overlaps(&self, other: &CertifiedReal) -> bool {
        let d = Float::with_val(self.prec().max(other.prec()), &self.value - &other.value);
        let r = add_up(&self.error, &other.error);
        *d.as_abs() <= r
    }

    fn round_err(v: &Float) -> Float {
        mul_up(&rad_of(v), &ulp(v.prec()))
    }

    pub fn add(&self, o: &CertifiedReal) -> CertifiedReal {
        let v = Float::with_val(self.prec(), &self.value + &o.value);
        let e = add_up(&add_up(&self.error, &o.error), &Self::round_err(&v));
        CertifiedReal { value: v, error: e }
    }

    pub fn sub(&self, o: &CertifiedReal) -> CertifiedReal {
        let v = Float::with_val(self.prec(), &self.value - &o.value);
        let e = add_up(&add_up(&self.error, &o.error), &Self::round_err(&v));
        CertifiedReal { value: v, error: e }
    }

    pub fn mul(&self, o: &CertifiedReal) -> CertifiedReal {
        let v = Float::with_val(self.prec(), &self.value * &o.value);
        let mut e = mul_up(&rad_of(&self.value), &o.error);
        e = add_up(&e, &mul_up(&rad_of(&o.value), &self.error));
        e = add_up(&e, &mul_up(&self.error, &o.error));
        e = add_up(&e, &Self::round_err(&v));
        CertifiedReal { value: v, error: e }
    }

    pub fn scale(&self, s: &Float) -> CertifiedReal {
        self.mul(&CertifiedReal::exact(s.clone()))
    }

    /// Quotient; the divisor enclosure must exclude zero.
    pub fn div(&self, o: &CertifiedReal) -> Result<CertifiedReal> {
        let denom_low = Float::with_val_round(RAD_PREC, &*o.value.as_abs() - &o.error, Round::Down).0;
        if denom_low <= 0 {
            return Err(Error::Numeric("division by an enclosure containing zero".into()));
        }
        let v = Float::with_val(self.prec(), &self.value / &o.value);
        let num = add_up(&self.error, &mul_up(&rad_of(&v), &o.error));
        let e = add_up(&div_up(&num, &denom_low), &Self::round_err(&v));
        Ok(CertifiedReal { value: v, error: e })
    }

    pub fn sqrt(&self) -> Result<CertifiedReal> {
        if self.value <= 0 {
            return Err(Error::Numeric("square root of a non-positive enclosure".into()));
        }
        let v = Float::with_val(self.prec(), self.value.sqrt_ref());
        // |sqrt x - sqrt a| <= |x - a| / sqrt a
        let e = add_up(&div_up(&self.error, &rad_of(&v)), &Self::round_err(&v));
        Ok(CertifiedReal { value: v, error: e })
    }

    pub fn ln(&self) -> Result<CertifiedReal> {
        let low = Float::with_val_round(RAD_PREC, &self.value - &self.error, Round::Down).0;
        if low <= 0 {
            return Err(Error::Numeric("logarithm of an enclosure reaching zero".into()));
        }
        let v = Float::with_val(self.prec(), self.value.ln_ref());
        let e = add_up(&div_up(&self.error, &low), &Self::round_err(&v));
        Ok(CertifiedReal { value: v, error: e })
    }

    pub fn exp(&self) -> CertifiedReal {
        let v = Float::with_val(self.prec(), self.value.exp_ref());
        // e^a (e^r - 1)
        let growth = Float::with_val_round(RAD_PREC, self.error.exp_m1_ref(), Round::Up).0;
        let e = add_up(&mul_up(&rad_of(&v), &growth), &Self::round_err(&v));
        CertifiedReal { value: v, error: e }
    }

    pub fn abs(&self) -> CertifiedReal {
        CertifiedReal { value: Float::with_val(self.prec(), &*self.value.as_abs()), error: self.error.clone() }
    }

    pub fn pow_u(&self, k: u32) -> CertifiedReal {
        let mut acc = CertifiedReal::exact(Float::with_val(self.prec(), 1));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", to_decimal(&self.value, 30), to_decimal(&self.error, 3))
    }
}

impl Serialize for CertifiedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CertifiedReal", 2)?;
        st.serialize_field("value", &to_decimal(&self.value, decimal_digits(self.prec())))?;
        st.serialize_field("error", &to_decimal(&self.error, 6))?;
        st.end()
    }
}

/// Complex number with high-precision components.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexHP {
    pub re: Float,
    pub im: Float,
}

impl ComplexHP {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn real(re: Float) -> Self {
        let p = re.prec();
        Self { re, im: Float::new(p) }
    }

    pub fn from_f64(prec: Prec, re: f64, im: f64) -> Self {
        Self { re: float(prec, re), im: float(prec, im) }
    }

    /// r e^{i theta}
    pub fn polar(r: &Float, theta: &Float) -> Self {
        let p = r.prec();
        let (s, c) = Float::with_val(p, theta).sin_cos(Float::new(p));
        Self { re: Float::with_val(p, r * &c), im: Float::with_val(p, r * &s) }
    }

    pub fn prec(&self) -> Prec {
        self.re.prec()
    }

    pub fn one(prec: Prec) -> Self {
        Self::real(Float::with_val(prec, 1))
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Self { re, im }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re / &n), im: -Float::with_val(p, &self.im / &n) }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow_u(&self, k: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Serialize for ComplexHP {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = decimal_digits(self.prec());
        [to_decimal(&self.re, d), to_decimal(&self.im, d)].serialize(s)
    }
}

/// x^k for a possibly large integer power, computed by MPFR.
pub fn powi(x: &Float, k: i64) -> Float {
    Float::with_val(x.prec(), x.pow(k))
}
