//! Dense univariate polynomials with [`Coefficient`] entries, lowest degree first.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::num::{Coefficient, Complex, GaussRational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<Coefficient>,
}

impl Poly {
    pub fn new(coeffs: Vec<Coefficient>) -> Self {
        Self { coeffs }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(vec![Coefficient::zero(prec)])
    }

    pub fn one(prec: u32) -> Self {
        Self::new(vec![Coefficient::one(prec)])
    }

    /// The monomial z^k.
    pub fn monomial(k: usize, prec: u32) -> Self {
        let mut c = vec![Coefficient::zero(prec); k + 1];
        c[k] = Coefficient::one(prec);
        Self::new(c)
    }

    pub fn from_exact(coeffs: &[GaussRational], prec: u32) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|c| Coefficient::from_exact(c.clone(), prec))
                .collect(),
        )
    }

    pub fn from_complex(coeffs: Vec<Complex>) -> Self {
        Self::new(coeffs.into_iter().map(Coefficient::inexact).collect())
    }

    /// Monic polynomial with the given zeros.
    pub fn from_roots(roots: &[Complex], prec: u32) -> Self {
        let mut p = Poly::one(prec);
        for r in roots {
            let lin = Poly::new(vec![Coefficient::inexact(-r), Coefficient::one(prec)]);
            p = p.mul(&lin);
        }
        p
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(Coefficient::prec).max().unwrap_or(64)
    }

    /// Length of the coefficient vector minus one.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Index of the highest coefficient that is not exactly zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_exact)
    }

    pub fn coeff(&self, k: usize) -> Coefficient {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Coefficient::zero(self.prec()))
    }

    pub fn exact_coeffs(&self) -> Option<Vec<GaussRational>> {
        self.coeffs.iter().map(|c| c.exact.clone()).collect()
    }

    pub fn values(&self) -> Vec<Complex> {
        self.coeffs.iter().map(|c| c.value.clone()).collect()
    }

    /// Drop exactly-zero coefficients above the degree (keeps at least one entry).
    pub fn trim(mut self) -> Self {
        let keep = self.degree().map_or(1, |d| d + 1);
        self.coeffs.truncate(keep);
        self
    }

    /// Keep coefficients of degree <= `deg`.
    pub fn truncate(&self, deg: usize) -> Self {
        let mut c: Vec<_> = self.coeffs.iter().take(deg + 1).cloned().collect();
        if c.is_empty() {
            c.push(Coefficient::zero(self.prec()));
        }
        Self::new(c)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.with_prec(prec)).collect())
    }

    pub fn forget_exact(&self) -> Self {
        Self::new(self.coeffs.iter().map(Coefficient::forget_exact).collect())
    }

    /// Horner evaluation at the coefficient values.
    pub fn eval(&self, z: &Complex) -> Complex {
        let prec = self.prec().max(z.prec());
        let mut acc = Complex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &c.value;
        }
        acc
    }

    /// Exact evaluation when every coefficient and the point are exact.
    pub fn eval_exact(&self, z: &GaussRational) -> Option<GaussRational> {
        let mut acc = GaussRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c.exact.as_ref()?;
        }
        Some(acc)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let prec = self.prec().max(other.prec());
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Coefficient::zero(prec);
        Poly::new(
            (0..len)
                .map(|k| {
                    let a = self.coeffs.get(k).unwrap_or(&zero);
                    let b = other.coeffs.get(k).unwrap_or(&zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let prec = self.prec().max(other.prec());
        let mut out = vec![Coefficient::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &Coefficient) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divide every coefficient by `s`.
    pub fn div_scalar(&self, s: &Coefficient) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.div(s)).collect())
    }

    /// Maximum coefficient modulus.
    pub fn norm_inf(&self) -> Float {
        let prec = self.prec();
        self.coeffs
            .iter()
            .map(Coefficient::abs)
            .fold(Float::new(prec), |m, a| if a > m { a } else { m })
    }

    /// Sum of coefficient moduli.
    pub fn norm1(&self) -> Float {
        let prec = self.prec();
        self.coeffs
            .iter()
            .fold(Float::new(prec), |acc, c| acc + c.abs())
    }

    /// Coefficient-norm distance sum_k |a_k - b_k|.
    pub fn dist(&self, other: &Poly) -> Float {
        self.sub(other).norm1()
    }

    /// Number of leading low-order coefficients with modulus at most `tol`.
    pub fn order_at_origin(&self, tol: &Float) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| c.is_zero() || c.abs() <= *tol)
            .count()
            .min(self.coeffs.len().saturating_sub(1))
    }

    /// Divide by z^k, discarding the k lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Poly {
        if k >= self.coeffs.len() {
            return Poly::zero(self.prec());
        }
        Poly::new(self.coeffs[k..].to_vec())
    }

    /// Synthetic division by (z - r): returns (quotient, remainder).
    pub fn deflate(&self, r: &Complex) -> (Poly, Complex) {
        let n = self.coeffs.len();
        if n <= 1 {
            return (Poly::zero(self.prec()), self.coeff(0).value);
        }
        let mut q = vec![Complex::zero(self.prec()); n - 1];
        let mut acc = self.coeffs[n - 1].value.clone();
        for k in (0..n - 1).rev() {
            q[k] = acc.clone();
            acc = &(&acc * r) + &self.coeffs[k].value;
        }
        (Poly::from_complex(q), acc)
    }

    /// Exact synthetic division by (z - r).
    pub fn deflate_exact(&self, r: &GaussRational) -> Option<(Poly, GaussRational)> {
        let ex = self.exact_coeffs()?;
        let n = ex.len();
        if n <= 1 {
            return Some((Poly::zero(self.prec()), ex.first().cloned().unwrap_or_else(GaussRational::zero)));
        }
        let mut q = vec![GaussRational::zero(); n - 1];
        let mut acc = ex[n - 1].clone();
        for k in (0..n - 1).rev() {
            q[k] = acc.clone();
            acc = &(&acc * r) + &ex[k];
        }
        Some((Poly::from_exact(&q, self.prec()), acc))
    }
}
