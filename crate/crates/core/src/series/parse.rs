//! Expression grammar for series definitions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | atom)*      juxtaposition multiplies
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := number | 'z' | 'i' | func '(' expr ')' | '(' expr ')'
//! func   := 'exp' | 'log' | 'sqrt'
//! number := digits ['.' digits] [('e' | 'E') ['-'] digits]  (exact decimal)
//! ```
//!
//! Rational functions of z with exact coefficients are kept symbolic until an
//! operation needs a series, so `1/(z-1)` becomes a single rational-function
//! node with an exact coefficient recurrence.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::PowerSeries;
use crate::error::{Error, Result};
use crate::num::{Coefficient, GaussRational};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                frac = chars[fs..i].iter().collect();
            }
            let mut exp10: i64 = 0;
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let neg = chars.get(j) == Some(&'-');
                if neg || chars.get(j) == Some(&'+') {
                    j += 1;
                }
                let es = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                // Only treat it as an exponent when digits follow; otherwise `e`
                // starts an identifier such as `exp`.
                if j > es {
                    let digits: String = chars[es..j].iter().collect();
                    exp10 = digits.parse().map_err(|_| Error::Parse {
                        column: col,
                        message: "exponent too large".into(),
                    })?;
                    if neg {
                        exp10 = -exp10;
                    }
                    i = j;
                }
            }
            let digits = format!("{int_part}{frac}");
            let mantissa = Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10)
                .map_err(|e| Error::Parse {
                    column: col,
                    message: e.to_string(),
                })?;
            let scale = exp10 - frac.len() as i64;
            let ten = Integer::from(10);
            let value = if scale >= 0 {
                Rational::from(mantissa * Integer::from((&ten).pow(scale as u32)))
            } else {
                Rational::from((mantissa, Integer::from((&ten).pow((-scale) as u32))))
            };
            out.push((Tok::Num(value), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(Error::Parse {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Intermediate value: an exact rational function, or a general series.
#[derive(Clone)]
enum Val {
    Rat { num: Vec<GaussRational>, den: Vec<GaussRational> },
    Series(PowerSeries),
}

fn trim(mut p: Vec<GaussRational>) -> Vec<GaussRational> {
    while p.len() > 1 && p.last().is_some_and(GaussRational::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(GaussRational::zero());
    }
    p
}

fn padd(a: &[GaussRational], b: &[GaussRational]) -> Vec<GaussRational> {
    let n = a.len().max(b.len());
    let z = GaussRational::zero();
    trim((0..n).map(|k| a.get(k).unwrap_or(&z) + b.get(k).unwrap_or(&z)).collect())
}

fn pmul(a: &[GaussRational], b: &[GaussRational]) -> Vec<GaussRational> {
    let mut out = vec![GaussRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn pneg(a: &[GaussRational]) -> Vec<GaussRational> {
    a.iter().map(|x| -x).collect()
}

fn is_zero_poly(a: &[GaussRational]) -> bool {
    a.iter().all(GaussRational::is_zero)
}

impl Val {
    fn constant(c: GaussRational) -> Self {
        Val::Rat {
            num: vec![c],
            den: vec![GaussRational::one()],
        }
    }

    /// Normalise so a constant denominator is folded into the numerator.
    fn rat(num: Vec<GaussRational>, den: Vec<GaussRational>) -> Self {
        let num = trim(num);
        let den = trim(den);
        if den.len() == 1 {
            let inv = den[0].recip().expect("zero denominator filtered by caller");
            return Val::Rat {
                num: num.iter().map(|c| c * &inv).collect(),
                den: vec![GaussRational::one()],
            };
        }
        Val::Rat { num, den }
    }

    fn into_series(self, col: usize) -> Result<PowerSeries> {
        match self {
            Val::Series(s) => Ok(s),
            Val::Rat { num, den } => {
                if den.len() == 1 {
                    Ok(PowerSeries::polynomial_exact(&num))
                } else {
                    PowerSeries::rational_fn(Poly::from_exact(&num, 64), Poly::from_exact(&den, 64)).map_err(
                        |e| Error::Parse {
                            column: col,
                            message: e.to_string(),
                        },
                    )
                }
            }
        }
    }

    fn add(self, other: Val, col: usize) -> Result<Val> {
        match (self, other) {
            (Val::Rat { num: a, den: b }, Val::Rat { num: c, den: d }) => {
                Ok(Val::rat(padd(&pmul(&a, &d), &pmul(&c, &b)), pmul(&b, &d)))
            }
            (x, y) => Ok(Val::Series(crate::series::series_add(
                &x.into_series(col)?,
                &y.into_series(col)?,
            ))),
        }
    }

    fn neg(self) -> Val {
        match self {
            Val::Rat { num, den } => Val::Rat { num: pneg(&num), den },
            Val::Series(s) => Val::Series(PowerSeries::scalar_multiple(
                Coefficient::from_exact(GaussRational::from_int(-1), 64),
                s,
            )),
        }
    }

    fn mul(self, other: Val, col: usize) -> Result<Val> {
        match (self, other) {
            (Val::Rat { num: a, den: b }, Val::Rat { num: c, den: d }) => Ok(Val::rat(pmul(&a, &c), pmul(&b, &d))),
            (Val::Rat { num, den }, Val::Series(s)) | (Val::Series(s), Val::Rat { num, den }) if den.len() == 1 && num.len() == 1 => {
                Ok(Val::Series(PowerSeries::scalar_multiple(
                    Coefficient::from_exact(num[0].clone(), 64),
                    s,
                )))
            }
            (x, y) => Ok(Val::Series(PowerSeries::product(x.into_series(col)?, y.into_series(col)?))),
        }
    }

    fn div(self, other: Val, col: usize) -> Result<Val> {
        match (self, other) {
            (Val::Rat { num: a, den: b }, Val::Rat { num: c, den: d }) => {
                if is_zero_poly(&c) {
                    return Err(Error::Parse {
                        column: col,
                        message: "division by zero".into(),
                    });
                }
                Ok(Val::rat(pmul(&a, &d), pmul(&b, &c)))
            }
            (x, y) => {
                let q = PowerSeries::quotient(x.into_series(col)?, y.into_series(col)?).map_err(|e| Error::Parse {
                    column: col,
                    message: e.to_string(),
                })?;
                Ok(Val::Series(q))
            }
        }
    }

    fn powi(self, k: i64, col: usize) -> Result<Val> {
        let mut acc = Val::constant(GaussRational::one());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(self.clone(), col)?;
        }
        if k < 0 {
            acc = Val::constant(GaussRational::one()).div(acc, col)?;
        }
        Ok(acc)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.add(rhs, col)?;
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.add(rhs.neg(), col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.unary()?;
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.mul(rhs, col)?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.div(rhs, col)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.power()?;
                    acc = acc.mul(rhs, col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Val> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Val> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let col = self.col();
        let neg = if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        let k = match self.peek() {
            Some(Tok::Num(r)) if *r.denom() == 1 => r.numer().to_i64(),
            _ => None,
        };
        let Some(k) = k.filter(|k| *k <= 64) else {
            return self.err("exponent must be an integer literal at most 64");
        };
        self.pos += 1;
        base.powi(if neg { -k } else { k }, col)
    }

    fn atom(&mut self) -> Result<Val> {
        let col = self.col();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok(Val::constant(GaussRational::from_real(r))),
            Tok::Op('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Val::Rat {
                    num: vec![GaussRational::zero(), GaussRational::one()],
                    den: vec![GaussRational::one()],
                }),
                "i" => Ok(Val::constant(GaussRational::i())),
                "exp" | "log" | "sqrt" => {
                    self.expect('(')?;
                    let arg_col = self.col();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    let inner = arg.into_series(arg_col)?;
                    let wrap = |e: Error| Error::Parse {
                        column: col,
                        message: e.to_string(),
                    };
                    let s = match name.as_str() {
                        "exp" => PowerSeries::exp_of(inner),
                        "log" => PowerSeries::log_of(inner).map_err(wrap)?,
                        _ => PowerSeries::sqrt_of(inner).map_err(wrap)?,
                    };
                    Ok(Val::Series(s))
                }
                other => {
                    self.pos -= 1;
                    self.err(format!("unknown identifier `{other}`"))
                }
            },
            Tok::Op(c) => {
                self.pos -= 1;
                self.err(format!("unexpected `{c}`"))
            }
        }
    }
}

/// Parse a series expression such as `1/(z-1) + exp(z)` or `sqrt(1 - z/2)`.
pub fn parse_series(src: &str) -> Result<PowerSeries> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: src.chars().count() + 1,
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    v.into_series(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Kind;

    fn c(s: &PowerSeries, k: usize) -> GaussRational {
        s.coeff(k, 128).exact.unwrap()
    }

    #[test]
    fn rational_function_literal() {
        let f = parse_series("1/((z-1)*(z-2))").unwrap();
        assert!(matches!(f.kind(), Kind::RationalFn { .. }));
        // 1/((1-z)(2-z)) = sum (1 - 2^{-k-1}) z^k
        assert_eq!(c(&f, 0), GaussRational::from_ratio(1, 2));
        assert_eq!(c(&f, 3), GaussRational::from_ratio(15, 16));
    }

    #[test]
    fn shared_pole_components() {
        let f1 = parse_series("1/(z-1) + exp(z)").unwrap();
        assert_eq!(c(&f1, 0), GaussRational::zero());
        assert_eq!(c(&f1, 2), GaussRational::from_ratio(-1, 2));
        let f2 = parse_series("log(z-1)").unwrap();
        assert_eq!(c(&f2, 4), GaussRational::from_ratio(-1, 4));
        assert!(!f2.coeff(0, 128).is_exact());
    }

    #[test]
    fn decimals_are_exact() {
        let f = parse_series("0.25*z^2 - 1.5e1").unwrap();
        assert_eq!(c(&f, 0), GaussRational::from_int(-15));
        assert_eq!(c(&f, 2), GaussRational::from_ratio(1, 4));
    }

    #[test]
    fn sqrt_and_complex_literals() {
        let f = parse_series("sqrt(1 - z/2)").unwrap();
        assert_eq!(c(&f, 1), GaussRational::from_ratio(-1, 4));
        let g = parse_series("1/(z - i)").unwrap();
        // 1/(z - i) = -1/i * 1/(1 + i z) ... coefficient 0 is -1/i = i
        assert_eq!(c(&g, 0), GaussRational::i());
    }

    #[test]
    fn errors_carry_columns() {
        match parse_series("1/(z-1) + foo(z)") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 11),
            other => panic!("unexpected {other:?}"),
        }
        match parse_series("1/z") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("not expandable")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_series("(z").is_err());
    }
}
