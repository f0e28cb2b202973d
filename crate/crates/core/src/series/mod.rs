//! Formal power series about the origin given by coefficient oracles.
//!
//! A [`PowerSeries`] is an immutable expression tree. Coefficients are produced
//! on demand by recurrences (Cauchy products, quotients, and the first-order
//! ODEs satisfied by `exp`, `log` and `sqrt` of a series), memoised per working
//! precision. Exact Gaussian-rational values are carried whenever every input
//! of a recurrence step is exact.

mod parse;
mod system;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::num::{Coefficient, Complex, GaussRational};
use crate::poly::Poly;

pub use parse::parse_series;
pub use system::{poly_combo, DegreeBounds, MultiIndex, PolyCombo, SeriesSystem};

/// Extra bits carried by the memo tables above the requested precision.
const GUARD_BITS: u32 = 32;

/// The shape of a series.
#[derive(Clone)]
pub enum Kind {
    Polynomial(Vec<Coefficient>),
    RationalFn { num: Poly, den: Poly },
    Exp(PowerSeries),
    Log(PowerSeries),
    Sqrt(PowerSeries),
    Sum(Vec<PowerSeries>),
    Product(PowerSeries, PowerSeries),
    Quotient(PowerSeries, PowerSeries),
    ScalarMultiple(Coefficient, PowerSeries),
    Truncated(PowerSeries, usize),
}

struct Node {
    kind: Kind,
    radius_hint: Option<f64>,
    cache: RwLock<HashMap<u32, Vec<Coefficient>>>,
}

/// Cheaply clonable handle to a series.
#[derive(Clone)]
pub struct PowerSeries(Arc<Node>);

impl PowerSeries {
    fn from_kind(kind: Kind, radius_hint: Option<f64>) -> Self {
        Self(Arc::new(Node {
            kind,
            radius_hint,
            cache: RwLock::new(HashMap::new()),
        }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Known radius of convergence, if the constructor could tell.
    pub fn radius_hint(&self) -> Option<f64> {
        self.0.radius_hint
    }

    pub fn with_radius_hint(&self, r: f64) -> Self {
        Self::from_kind(self.0.kind.clone(), Some(r))
    }

    pub fn polynomial(coeffs: Vec<Coefficient>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Coefficient::zero(64)]
        } else {
            coeffs
        };
        Self::from_kind(Kind::Polynomial(coeffs), Some(f64::INFINITY))
    }

    pub fn polynomial_exact(coeffs: &[GaussRational]) -> Self {
        Self::polynomial(
            coeffs
                .iter()
                .map(|c| Coefficient::from_exact(c.clone(), 64))
                .collect(),
        )
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::polynomial(vec![c])
    }

    /// The series z.
    pub fn z() -> Self {
        Self::polynomial_exact(&[GaussRational::zero(), GaussRational::one()])
    }

    pub fn zero() -> Self {
        Self::polynomial_exact(&[GaussRational::zero()])
    }

    /// num / den as a Taylor series; requires den(0) != 0.
    pub fn rational_fn(num: Poly, den: Poly) -> Result<Self> {
        if den.coeff(0).is_zero() {
            return Err(Error::NotExpandable("denominator vanishes at 0".into()));
        }
        Ok(Self::from_kind(Kind::RationalFn { num, den }, None))
    }

    /// exp(z).
    pub fn exp() -> Self {
        Self::exp_of(Self::z())
    }

    pub fn exp_of(inner: PowerSeries) -> Self {
        let hint = match inner.kind() {
            Kind::Polynomial(_) => Some(f64::INFINITY),
            _ => inner.radius_hint(),
        };
        Self::from_kind(Kind::Exp(inner), hint)
    }

    /// Principal branch of log(z - a).
    pub fn log_shift(a: Coefficient) -> Result<Self> {
        let prec = a.prec();
        let inner = Self::polynomial(vec![-&a, Coefficient::one(prec)]);
        let r = a.abs().to_f64();
        Ok(Self::log_of(inner)?.with_radius_hint(r))
    }

    /// Principal branch of log(h); requires h(0) != 0.
    pub fn log_of(inner: PowerSeries) -> Result<Self> {
        if inner.coeff(0, 128).is_zero() {
            return Err(Error::NotExpandable("log of a series vanishing at 0".into()));
        }
        Ok(Self::from_kind(Kind::Log(inner), None))
    }

    /// sqrt(1 - z/a), principal branch.
    pub fn algebraic_branch(a: Coefficient) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::BranchAtOrigin);
        }
        let prec = a.prec();
        let inner = Self::polynomial(vec![Coefficient::one(prec), -&Coefficient::one(prec).div(&a)]);
        let r = a.abs().to_f64();
        Ok(Self::sqrt_of(inner)?.with_radius_hint(r))
    }

    /// Principal branch of sqrt(h); requires h(0) != 0.
    pub fn sqrt_of(inner: PowerSeries) -> Result<Self> {
        if inner.coeff(0, 128).is_zero() {
            return Err(Error::BranchAtOrigin);
        }
        Ok(Self::from_kind(Kind::Sqrt(inner), None))
    }

    pub fn sum(terms: Vec<PowerSeries>) -> Self {
        let hint = terms
            .iter()
            .map(PowerSeries::radius_hint)
            .try_fold(f64::INFINITY, |acc, h| h.map(|h| acc.min(h)));
        Self::from_kind(Kind::Sum(terms), hint)
    }

    pub fn product(a: PowerSeries, b: PowerSeries) -> Self {
        let hint = match (a.radius_hint(), b.radius_hint()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            _ => None,
        };
        Self::from_kind(Kind::Product(a, b), hint)
    }

    /// a / b; requires b(0) != 0.
    pub fn quotient(a: PowerSeries, b: PowerSeries) -> Result<Self> {
        if b.coeff(0, 128).is_zero() {
            return Err(Error::NotExpandable("divisor vanishes at 0".into()));
        }
        Ok(Self::from_kind(Kind::Quotient(a, b), None))
    }

    pub fn scalar_multiple(c: Coefficient, s: PowerSeries) -> Self {
        let hint = s.radius_hint();
        Self::from_kind(Kind::ScalarMultiple(c, s), hint)
    }

    /// The series with every coefficient above `degree` replaced by 0.
    pub fn truncated(s: PowerSeries, degree: usize) -> Self {
        Self::from_kind(Kind::Truncated(s, degree), Some(f64::INFINITY))
    }

    /// Constant polynomial when this series is one, as its single coefficient.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.kind() {
            Kind::Polynomial(c) if c.iter().skip(1).all(Coefficient::is_zero) => Some(c[0].clone()),
            _ => None,
        }
    }

    /// Coefficient of z^index at `prec` bits.
    pub fn coeff(&self, index: usize, prec: u32) -> Coefficient {
        {
            let cache = self.0.cache.read().expect("series cache poisoned");
            if let Some(v) = cache.get(&prec) {
                if let Some(c) = v.get(index) {
                    return c.with_prec(prec);
                }
            }
        }
        let mut cache = self.0.cache.write().expect("series cache poisoned");
        let v = cache.entry(prec).or_default();
        let ip = prec + GUARD_BITS;
        while v.len() <= index {
            let k = v.len();
            let c = self.compute(k, v, ip);
            v.push(c);
        }
        v[index].with_prec(prec)
    }

    /// Coefficients 0..=upto at `prec` bits.
    pub fn coeffs(&self, upto: usize, prec: u32) -> Vec<Coefficient> {
        // One call fills the cache up to `upto`; the rest are cache hits.
        self.coeff(upto, prec);
        (0..=upto).map(|k| self.coeff(k, prec)).collect()
    }

    /// Next coefficient from the recurrence of this node. `prev` holds
    /// indices 0..k at internal precision `ip`.
    fn compute(&self, k: usize, prev: &[Coefficient], ip: u32) -> Coefficient {
        // Children are queried at the caller's precision level, which is
        // ip - GUARD_BITS; they carry their own guard bits.
        let cp = ip - GUARD_BITS;
        let child = |s: &PowerSeries, j: usize| s.coeff_internal(j, cp);
        match &self.0.kind {
            Kind::Polynomial(c) => c
                .get(k)
                .map(|x| x.with_prec(ip))
                .unwrap_or_else(|| Coefficient::zero(ip)),
            Kind::RationalFn { num, den } => {
                let mut acc = num.coeff(k).with_prec(ip);
                for j in 1..=k.min(den.nominal_degree()) {
                    let d = &den.coeffs[j];
                    if d.is_zero() {
                        continue;
                    }
                    acc = &acc - &(&d.with_prec(ip) * &prev[k - j]);
                }
                acc.div(&den.coeffs[0].with_prec(ip))
            }
            Kind::Exp(h) => {
                if k == 0 {
                    let h0 = child(h, 0);
                    if h0.is_zero() {
                        return Coefficient::one(ip);
                    }
                    return Coefficient::inexact(h0.value.exp());
                }
                let mut acc = Coefficient::zero(ip);
                for j in 1..=k {
                    let hj = child(h, j);
                    if hj.is_zero() {
                        continue;
                    }
                    let term = &hj.scale_exact(&GaussRational::from_int(j as i64)) * &prev[k - j];
                    acc = &acc + &term;
                }
                acc.scale_exact(&GaussRational::from_ratio(1, k as i64))
            }
            Kind::Log(h) => {
                let h0 = child(h, 0);
                if k == 0 {
                    if let Some(e) = &h0.exact {
                        if *e == GaussRational::one() {
                            return Coefficient::zero(ip);
                        }
                    }
                    return Coefficient::inexact(h0.value.ln());
                }
                let mut acc = Coefficient::zero(ip);
                for j in 1..k {
                    let hkj = child(h, k - j);
                    if hkj.is_zero() {
                        continue;
                    }
                    let term = &prev[j].scale_exact(&GaussRational::from_int(j as i64)) * &hkj;
                    acc = &acc + &term;
                }
                let acc = acc.scale_exact(&GaussRational::from_ratio(1, k as i64));
                (&child(h, k) - &acc).div(&h0)
            }
            Kind::Sqrt(h) => {
                if k == 0 {
                    return sqrt_coefficient(&child(h, 0), ip);
                }
                let mut acc = Coefficient::zero(ip);
                for j in 1..k {
                    acc = &acc + &(&prev[j] * &prev[k - j]);
                }
                let two_s0 = prev[0].scale_exact(&GaussRational::from_int(2));
                (&child(h, k) - &acc).div(&two_s0)
            }
            Kind::Sum(terms) => terms
                .iter()
                .fold(Coefficient::zero(ip), |acc, t| &acc + &child(t, k)),
            Kind::Product(a, b) => {
                let mut acc = Coefficient::zero(ip);
                for j in 0..=k {
                    let aj = child(a, j);
                    if aj.is_zero() {
                        continue;
                    }
                    let bk = child(b, k - j);
                    if bk.is_zero() {
                        continue;
                    }
                    acc = &acc + &(&aj * &bk);
                }
                acc
            }
            Kind::Quotient(a, b) => {
                let mut acc = child(a, k);
                for j in 1..=k {
                    let bj = child(b, j);
                    if bj.is_zero() {
                        continue;
                    }
                    acc = &acc - &(&bj * &prev[k - j]);
                }
                acc.div(&child(b, 0))
            }
            Kind::ScalarMultiple(c, s) => &c.with_prec(ip) * &child(s, k),
            Kind::Truncated(s, t) => {
                if k <= *t {
                    child(s, k)
                } else {
                    Coefficient::zero(ip)
                }
            }
        }
    }

    /// Child coefficient at the child's internal precision (unrounded).
    fn coeff_internal(&self, index: usize, prec: u32) -> Coefficient {
        self.coeff(index, prec);
        let cache = self.0.cache.read().expect("series cache poisoned");
        cache[&prec][index].clone()
    }

    /// Whether every coefficient up to `upto` is exact.
    pub fn is_exact_through(&self, upto: usize, prec: u32) -> bool {
        (0..=upto).all(|k| self.coeff(k, prec).is_exact())
    }
}

/// Principal square root of a constant term, exact for squares of rationals.
fn sqrt_coefficient(h0: &Coefficient, prec: u32) -> Coefficient {
    if let Some(e) = &h0.exact {
        if e.is_real() && e.re > 0 {
            let num = e.re.numer();
            let den = e.re.denom();
            if num.is_perfect_square() && den.is_perfect_square() {
                let r = Rational::from((Integer::from(num.sqrt_ref()), Integer::from(den.sqrt_ref())));
                return Coefficient::from_exact(GaussRational::from_real(r), prec);
            }
        }
    }
    Coefficient::inexact(h0.value.with_prec(prec).sqrt())
}

/// Sum of two series.
pub fn series_add(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    PowerSeries::sum(vec![a.clone(), b.clone()])
}

/// Cauchy product of two series truncated after degree `truncation`.
pub fn series_mul(a: &PowerSeries, b: &PowerSeries, truncation: usize) -> PowerSeries {
    PowerSeries::truncated(PowerSeries::product(a.clone(), b.clone()), truncation)
}

/// Evaluate the Taylor polynomial of degree `degree` at `z`.
pub fn eval_partial_sum(s: &PowerSeries, z: &Complex, degree: usize, prec: u32) -> Complex {
    let mut acc = Complex::zero(prec);
    for k in (0..=degree).rev() {
        acc = &(&acc * z) + &s.coeff(k, prec).value;
    }
    acc
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn poly_str(c: &[Coefficient]) -> String {
            let terms: Vec<String> = c
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| {
                    let v = match &x.exact {
                        Some(e) => format!("({e})"),
                        None => format!("({})", x.value),
                    };
                    match k {
                        0 => v,
                        1 => format!("{v}*z"),
                        _ => format!("{v}*z^{k}"),
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        }
        match self.kind() {
            Kind::Polynomial(c) => write!(f, "{}", poly_str(c)),
            Kind::RationalFn { num, den } => {
                write!(f, "({})/({})", poly_str(&num.coeffs), poly_str(&den.coeffs))
            }
            Kind::Exp(h) => write!(f, "exp({h})"),
            Kind::Log(h) => write!(f, "log({h})"),
            Kind::Sqrt(h) => write!(f, "sqrt({h})"),
            Kind::Sum(t) => {
                let parts: Vec<String> = t.iter().map(|s| s.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            Kind::Product(a, b) => write!(f, "({a})*({b})"),
            Kind::Quotient(a, b) => write!(f, "({a})/({b})"),
            Kind::ScalarMultiple(c, s) => write!(f, "{c:?}*({s})"),
            Kind::Truncated(s, t) => write!(f, "trunc[{t}]({s})"),
        }
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries({self})")
    }
}

/// Magnitude of a coefficient in f64, for diagnostics.
pub fn coeff_abs_f64(c: &Coefficient) -> f64 {
    let a: Float = c.abs();
    a.to_f64()
}
