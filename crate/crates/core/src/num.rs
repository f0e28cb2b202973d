//! Multiprecision scalars: complex floats over MPFR, exact Gaussian rationals,
//! and the [`Coefficient`] type that carries both.
//!
//! Every inexact value keeps its working precision in bits (`Float::prec`).
//! Exact values are kept alongside the rounded float so that downstream
//! algorithms can take an exact path when every input admits one.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;

/// Default working precision of a run.
pub const DEFAULT_PRECISION: u32 = 512;

/// π at `prec` bits, computed once per precision level.
pub fn pi(prec: u32) -> Float {
    static CACHE: OnceLock<Mutex<HashMap<u32, Float>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("pi cache poisoned");
    guard
        .entry(prec)
        .or_insert_with(|| Float::with_val(prec, Constant::Pi))
        .clone()
}

/// 2^exp as a float of precision `prec`.
pub fn pow2(prec: u32, exp: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, exp))
}

/// Natural log of a nonnegative float as f64, `-inf` for zero.
///
/// Works for magnitudes far outside the f64 exponent range.
pub fn ln_f64(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mant, exp) = x.to_f64_exp();
    mant.abs().ln() + f64::from(exp) * std::f64::consts::LN_2
}

/// `x^(1/n)` as f64 for a nonnegative float, via logs.
pub fn nth_root_f64(x: &Float, n: usize) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    (ln_f64(x) / n as f64).exp()
}

/// Exact hex encoding `"<prec>:<mantissa@exp>"`, lossless on round trip.
pub fn float_to_hex(x: &Float) -> String {
    format!("{}:{}", x.prec(), x.to_string_radix(16, None))
}

/// Inverse of [`float_to_hex`].
pub fn float_from_hex(s: &str) -> Result<Float, String> {
    let (prec, body) = s
        .split_once(':')
        .ok_or_else(|| format!("missing precision prefix in `{s}`"))?;
    let prec: u32 = prec
        .parse()
        .map_err(|e| format!("bad precision in `{s}`: {e}"))?;
    let parsed = Float::parse_radix(body, 16).map_err(|e| format!("bad hex float `{s}`: {e}"))?;
    Ok(Float::with_val(prec, parsed))
}

/// Serde adapter storing a `Float` as its lossless hex string.
pub mod float_hex {
    use rug::Float;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::float_to_hex(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Float, D::Error> {
        let s = String::deserialize(d)?;
        super::float_from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for extended reals: non-finite values travel as strings
/// ("inf", "-inf", "nan") since JSON has no literal for them.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Complex number with MPFR real and imaginary parts.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(x: Float) -> Self {
        let prec = x.prec();
        Self::new(x, Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Same value rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        let a = Float::with_val(prec, self.re.square_ref());
        let b = Float::with_val(prec, self.im.square_ref());
        a + b
    }

    /// Principal argument in (-π, π]; zero for the origin.
    pub fn arg(&self) -> Float {
        if self.is_zero() {
            return Float::new(self.prec());
        }
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, s: &Float) -> Self {
        let prec = self.prec();
        Self::new(
            Float::with_val(prec, &self.re * s),
            Float::with_val(prec, &self.im * s),
        )
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        let c = self.conj();
        Self::new(c.re / &d, c.im / &d)
    }

    pub fn div(&self, other: &Complex) -> Self {
        // Scale by the larger component first to avoid overflow in |other|^2.
        let prec = self.prec().max(other.prec());
        let (ar, ai) = (&other.re, &other.im);
        if ar.is_zero() && ai.is_zero() {
            return Self::new(
                Float::with_val(prec, rug::float::Special::Nan),
                Float::with_val(prec, rug::float::Special::Nan),
            );
        }
        if ar.cmp_abs(ai) != Some(std::cmp::Ordering::Less) {
            let r = Float::with_val(prec, ai / ar);
            let den = Float::with_val(prec, &r * ai) + ar;
            let re = (Float::with_val(prec, &self.im * &r) + &self.re) / &den;
            let im = (Float::with_val(prec, &self.im) - Float::with_val(prec, &self.re * &r)) / &den;
            Self::new(re, im)
        } else {
            let r = Float::with_val(prec, ar / ai);
            let den = Float::with_val(prec, &r * ar) + ai;
            let re = (Float::with_val(prec, &self.re * &r) + &self.im) / &den;
            let im = (Float::with_val(prec, &self.im * &r) - &self.re) / &den;
            Self::new(re, im)
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Complex::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let mag = Float::with_val(prec, self.re.exp_ref());
        let (s, c) = Float::with_val(prec, &self.im).sin_cos(Float::new(prec));
        Self::new(Float::with_val(prec, &mag * &c), Float::with_val(prec, &mag * &s))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let prec = self.prec();
        Self::new(Float::with_val(prec, self.abs().ln_ref()), self.arg())
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Complex::zero(prec);
        }
        let r = self.abs();
        // sqrt((r + |re|)/2) is computed without cancellation.
        let re_abs = Float::with_val(prec, self.re.abs_ref());
        let t = (Float::with_val(prec, &r + &re_abs) / 2u32).sqrt();
        let other = Float::with_val(prec, &self.im / &t) / 2u32;
        if !self.re.is_sign_negative() {
            Self::new(t, other)
        } else if self.im.is_sign_negative() {
            Self::new(other.abs(), -t)
        } else {
            Self::new(other.abs(), t)
        }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Distance |self - other| as an MPFR float.
    pub fn dist(&self, other: &Complex) -> Float {
        (self - other).abs()
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_c64();
        if im < 0.0 {
            write!(f, "{re:.12e}-{:.12e}i", -im)
        } else {
            write!(f, "{re:.12e}+{im:.12e}i")
        }
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [float_to_hex(&self.re), float_to_hex(&self.im)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[String; 2]>::deserialize(d)?;
        Ok(Complex::new(
            float_from_hex(&re).map_err(serde::de::Error::custom)?,
            float_from_hex(&im).map_err(serde::de::Error::custom)?,
        ))
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let prec = self.prec().max(rhs.prec());
        Complex::new(
            Float::with_val(prec, &self.re + &rhs.re),
            Float::with_val(prec, &self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let prec = self.prec().max(rhs.prec());
        Complex::new(
            Float::with_val(prec, &self.re - &rhs.re),
            Float::with_val(prec, &self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let prec = self.prec().max(rhs.prec());
        let ac = Float::with_val(prec, &self.re * &rhs.re);
        let bd = Float::with_val(prec, &self.im * &rhs.im);
        let ad = Float::with_val(prec, &self.re * &rhs.im);
        let bc = Float::with_val(prec, &self.im * &rhs.re);
        Complex::new(ac - bd, ad + bc)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -self.clone()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add, Complex);
forward_owned!(Sub, sub, Complex);
forward_owned!(Mul, mul, Complex);

/// Exact element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::new(), Rational::new())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(Rational::new(), Rational::from(1))
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(Rational::from(v), Rational::new())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::from((num, den)), Rational::new())
    }

    pub fn from_real(r: Rational) -> Self {
        Self::new(r, Rational::new())
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Rational::from(-&self.im))
    }

    pub fn norm_sqr(&self) -> Rational {
        Rational::from(self.re.square_ref()) + Rational::from(self.im.square_ref())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(Self::new(
            Rational::from(&self.re / &d),
            Rational::from(-&self.im) / d,
        ))
    }

    pub fn div(&self, other: &GaussRational) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = GaussRational::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(Rational::from(&self.re * r), Rational::from(&self.im * r))
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    /// Exact conversion of a finite complex float.
    pub fn from_complex(c: &Complex) -> Option<Self> {
        Some(Self::new(c.re.to_rational()?, c.im.to_rational()?))
    }

    /// Squared modulus as an f64 estimate, used only for comparisons.
    pub fn abs_f64(&self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            write!(f, "{}", self.re)
        } else if self.re == 0 {
            write!(f, "{}i", self.im)
        } else if self.im < 0 {
            write!(f, "{}-{}i", self.re, Rational::from(-&self.im))
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Serialize for GaussRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.re.to_string(), self.im.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[String; 2]>::deserialize(d)?;
        let parse = |s: &str| {
            Rational::parse(s)
                .map(Rational::from)
                .map_err(serde::de::Error::custom)
        };
        Ok(GaussRational::new(parse(&re)?, parse(&im)?))
    }
}

impl<'a> Add<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(
            Rational::from(&self.re + &rhs.re),
            Rational::from(&self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(
            Rational::from(&self.re - &rhs.re),
            Rational::from(&self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        if self.im == 0 && rhs.im == 0 {
            return GaussRational::from_real(Rational::from(&self.re * &rhs.re));
        }
        let ac = Rational::from(&self.re * &rhs.re);
        let bd = Rational::from(&self.im * &rhs.im);
        let ad = Rational::from(&self.re * &rhs.im);
        let bc = Rational::from(&self.im * &rhs.re);
        GaussRational::new(ac - bd, ad + bc)
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

forward_owned!(Add, add, GaussRational);
forward_owned!(Sub, sub, GaussRational);
forward_owned!(Mul, mul, GaussRational);

/// A series or polynomial coefficient: a complex float at working precision,
/// plus its exact Gaussian-rational value when one is known.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: Complex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<GaussRational>,
}

impl Coefficient {
    pub fn zero(prec: u32) -> Self {
        Self::from_exact(GaussRational::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_exact(GaussRational::one(), prec)
    }

    pub fn from_exact(exact: GaussRational, prec: u32) -> Self {
        Self {
            value: exact.to_complex(prec),
            exact: Some(exact),
        }
    }

    pub fn inexact(value: Complex) -> Self {
        Self { value, exact: None }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::inexact(Complex::from_f64(prec, re, im))
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exactly zero (exact zero, or an inexact float that is bitwise 0).
    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(e) => e.is_zero(),
            None => self.value.is_zero(),
        }
    }

    pub fn abs(&self) -> Float {
        self.value.abs()
    }

    /// Re-round to a new precision; exact values are re-rounded from the exact part.
    pub fn with_prec(&self, prec: u32) -> Self {
        match &self.exact {
            Some(e) => Self::from_exact(e.clone(), prec),
            None => Self::inexact(self.value.with_prec(prec)),
        }
    }

    /// Drop exactness information.
    pub fn forget_exact(&self) -> Self {
        Self::inexact(self.value.clone())
    }

    pub fn div(&self, other: &Coefficient) -> Coefficient {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if let Some(q) = a.div(b) {
                return Coefficient::from_exact(q, self.prec().max(other.prec()));
            }
        }
        Coefficient::inexact(self.value.div(&other.value))
    }

    pub fn scale_exact(&self, r: &GaussRational) -> Coefficient {
        let prec = self.prec();
        match &self.exact {
            Some(e) => Coefficient::from_exact(e * r, prec),
            None => Coefficient::inexact(&self.value * &r.to_complex(prec)),
        }
    }

    pub fn scale_complex(&self, c: &Complex) -> Coefficient {
        Coefficient::inexact(&self.value * c)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "~{}", self.value),
        }
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let prec = self.prec().max(rhs.prec());
        match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Coefficient::from_exact(a + b, prec),
            _ => Coefficient::inexact(&self.value + &rhs.value),
        }
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let prec = self.prec().max(rhs.prec());
        match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Coefficient::from_exact(a - b, prec),
            _ => Coefficient::inexact(&self.value - &rhs.value),
        }
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let prec = self.prec().max(rhs.prec());
        match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Coefficient::from_exact(a * b, prec),
            // An exact zero annihilates an inexact factor.
            (Some(a), None) if a.is_zero() => Coefficient::zero(prec),
            (None, Some(b)) if b.is_zero() => Coefficient::zero(prec),
            _ => Coefficient::inexact(&self.value * &rhs.value),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            value: -&self.value,
            exact: self.exact.as_ref().map(|e| -e),
        }
    }
}

forward_owned!(Add, add, Coefficient);
forward_owned!(Sub, sub, Coefficient);
forward_owned!(Mul, mul, Coefficient);

/// Binomial coefficient binom(1/2, k) as an exact rational.
pub fn binom_half(k: u32) -> Rational {
    let mut acc = Rational::from(1);
    let half = Rational::from((1, 2));
    for j in 0..k {
        let num = Rational::from(&half - j);
        acc *= num;
        acc /= j + 1;
    }
    acc
}

/// k! as an exact rational.
pub fn factorial(k: u32) -> Rational {
    Rational::from(rug::Integer::from(rug::Integer::factorial(k)))
}

/// Integer power of a float, used for scaling grids.
pub fn float_powi(x: &Float, k: i32) -> Float {
    Float::with_val(x.prec(), x.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_is_lossless() {
        let x = Float::with_val(300, Constant::Pi) / 7u32;
        let back = float_from_hex(&float_to_hex(&x)).unwrap();
        assert_eq!(back.prec(), 300);
        assert_eq!(x, back);
    }

    #[test]
    fn complex_sqrt_principal_branch() {
        let z = Complex::from_f64(128, -4.0, 0.0);
        let r = z.sqrt();
        assert!(r.re.to_f64().abs() < 1e-30);
        assert!((r.im.to_f64() - 2.0).abs() < 1e-30);
        let w = Complex::from_f64(128, -4.0, -0.0).sqrt();
        assert!(w.im.to_f64() < 0.0);
        let u = Complex::from_f64(128, 3.0, 4.0).sqrt();
        assert!((u.re.to_f64() - 2.0).abs() < 1e-30 && (u.im.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn complex_division_matches_reciprocal() {
        let a = Complex::from_f64(200, 1.5, -2.0);
        let b = Complex::from_f64(200, -0.25, 3.0);
        let q1 = a.div(&b);
        let q2 = &a * &b.recip();
        assert!(q1.dist(&q2).to_f64() < 1e-55);
    }

    #[test]
    fn exactness_propagates_through_arithmetic() {
        let a = Coefficient::from_exact(GaussRational::from_ratio(1, 3), 128);
        let b = Coefficient::from_exact(GaussRational::i(), 128);
        let c = &(&a * &b) + &a;
        assert_eq!(
            c.exact.unwrap(),
            GaussRational::new(Rational::from((1, 3)), Rational::from((1, 3)))
        );
        let d = &a + &Coefficient::from_f64(128, 1.0, 0.0);
        assert!(!d.is_exact());
        let zero_times_inexact = &Coefficient::zero(128) * &Coefficient::from_f64(128, 2.0, 0.0);
        assert!(zero_times_inexact.is_exact());
    }

    #[test]
    fn binom_half_values() {
        assert_eq!(binom_half(0), 1);
        assert_eq!(binom_half(1), Rational::from((1, 2)));
        assert_eq!(binom_half(2), Rational::from((-1, 8)));
        assert_eq!(binom_half(3), Rational::from((1, 16)));
    }

    #[test]
    fn ln_f64_handles_tiny_magnitudes() {
        let x = pow2(64, -5000);
        let l = ln_f64(&x);
        assert!((l + 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
