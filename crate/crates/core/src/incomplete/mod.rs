//! Incomplete Padé machinery on row sequences.
//!
//! A pair (p, q) of type (n, m, m*) has deg p <= n - m*, deg q <= m and
//! q f - p = O(z^(n+1)). Consecutive pairs satisfy
//!
//! ```text
//! p_{n+1} q_n - p_n q_{n+1} = A_n z^(n+1-lambda_n-lambda_{n+1}) q*_n
//! ```
//!
//! with deg q*_n <= m - m*. The records below recover A_n and q*_n and
//! measure how far the computed difference is from that shape.

mod lemma;
mod regularize;

pub use lemma::{lemma_probe, LemmaProbe, ProbeRegion};
pub use regularize::{regularize, HullChecks, HullForm, Regularization};

use std::collections::BTreeMap;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_affine2;
use crate::hp::HPApproximant;
use crate::num::{ext_real, float_hex, ln_f64, nth_root_f64, pow2, Coefficient, Complex};
use crate::poly::Poly;
use crate::roots::{roots, RootOptions};
use crate::series::SeriesSystem;
use crate::trajectory::Window;

/// A rational pair p/q of incomplete type (n, m, m*).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncompletePair {
    pub n: usize,
    pub m: usize,
    pub m_star: usize,
    pub p: Poly,
    pub q: Poly,
}

/// Component k of a Hermite-Padé approximant, of type (n, |m|, m_k).
pub fn hp_projection(system: &SeriesSystem, k: usize, approx: &HPApproximant) -> Result<IncompletePair> {
    let d = system.d();
    if k >= d {
        return Err(Error::ComponentOutOfRange { index: k, d });
    }
    Ok(IncompletePair {
        n: approx.n,
        m: system.m().total(),
        m_star: system.m().entries()[k],
        p: approx.numerators[k].clone(),
        q: approx.q().clone(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncompleteRecord {
    pub n: usize,
    pub m: usize,
    pub m_star: usize,
    /// A_{n,m}; zero when the difference vanishes.
    pub a: Coefficient,
    pub lambda_n: usize,
    pub lambda_n1: usize,
    /// Exponent n + 1 - lambda_n - lambda_{n+1} of the monomial factor.
    pub shift: usize,
    /// Normalized cofactor: (z - zeta) for |zeta| < 1, (1 - z/zeta) otherwise.
    pub qstar: Poly,
    pub qstar_zeros: Vec<Complex>,
    /// Largest coefficient of the difference outside the predicted window.
    #[serde(with = "float_hex")]
    pub structural_residual: Float,
    #[serde(with = "float_hex")]
    pub difference_norm: Float,
    /// The difference vanished: exact termination evidence.
    pub terminated: bool,
    /// Norm of the computed difference before a rounding-level difference is
    /// read as zero. Equal to `difference_norm` unless terminated.
    #[serde(with = "float_hex")]
    pub raw_norm: Float,
}

impl IncompleteRecord {
    pub fn a_abs(&self) -> Float {
        self.a.abs()
    }
}

/// Common order of p and q at the origin.
fn common_origin_order(p: &Poly, q: &Poly, prec: u32) -> usize {
    let order = |x: &Poly| {
        if x.is_zero() {
            return usize::MAX;
        }
        let tol = Float::with_val(prec, x.norm_inf() * pow2(prec, -(prec as i32) / 2));
        x.order_at_origin(&tol)
    };
    order(p).min(order(q))
}

/// A_n and q*_n from the consecutive pairs at n and n+1.
pub fn incomplete_record(r_n: &IncompletePair, r_n1: &IncompletePair, prec: u32) -> Result<IncompleteRecord> {
    let (n, m, ms) = (r_n.n, r_n.m, r_n.m_star);
    if r_n1.n != n + 1 || r_n1.m != m || r_n1.m_star != ms {
        return Err(Error::InvalidMultiIndex(format!(
            "pairs of type ({n},{m},{ms}) and ({},{},{}) are not consecutive",
            r_n1.n, r_n1.m, r_n1.m_star
        )));
    }
    let lambda_n = common_origin_order(&r_n.p, &r_n.q, prec);
    let lambda_n1 = common_origin_order(&r_n1.p, &r_n1.q, prec);
    let (p0, q0) = (r_n.p.shift_down(lambda_n), r_n.q.shift_down(lambda_n));
    let (p1, q1) = (r_n1.p.shift_down(lambda_n1), r_n1.q.shift_down(lambda_n1));
    let diff = p1.mul(&q0).sub(&p0.mul(&q1));
    let shift = (n + 1).saturating_sub(lambda_n + lambda_n1);
    let width = m - ms;
    let norm = diff.norm_inf();
    let mut outside = Float::new(prec);
    for (j, c) in diff.coeffs.iter().enumerate() {
        if j < shift || j > shift + width {
            let a = c.abs();
            if a > outside {
                outside = a;
            }
        }
    }
    // Rounding floor of the products: below it the difference is read as zero,
    // and so is everything outside the predicted window.
    let scale = Float::with_val(prec, p1.norm1() * q0.norm1()) + Float::with_val(prec, p0.norm1() * q1.norm1());
    let floor = Float::with_val(prec, &scale * pow2(prec, -(7 * prec as i32) / 8));
    let terminated = diff.coeffs.iter().all(Coefficient::is_zero) || (!diff.is_exact() && norm <= floor);
    if terminated {
        return Ok(IncompleteRecord {
            n,
            m,
            m_star: ms,
            a: Coefficient::zero(prec),
            lambda_n,
            lambda_n1,
            shift,
            qstar: Poly::one(prec),
            qstar_zeros: Vec::new(),
            structural_residual: Float::new(prec),
            difference_norm: Float::new(prec),
            terminated,
            raw_norm: norm,
        });
    }
    let tol = Float::with_val(prec, &norm * pow2(prec, -(prec as i32) / 2));
    if outside > tol {
        return Err(Error::DifferenceIdentityViolated {
            n,
            residual: outside.to_f64(),
            tolerance: tol.to_f64(),
        });
    }
    let cof = Poly::new((shift..=shift + width).map(|j| diff.coeff(j)).collect());
    let (a, qstar, qstar_zeros) = normalize_cofactor(&cof, prec)?;
    Ok(IncompleteRecord {
        n,
        m,
        m_star: ms,
        a,
        lambda_n,
        lambda_n1,
        shift,
        qstar,
        qstar_zeros,
        structural_residual: outside,
        raw_norm: norm.clone(),
        difference_norm: norm,
        terminated: false,
    })
}

/// Split c = A q* with q* in the unit-disk normal form.
fn normalize_cofactor(c: &Poly, prec: u32) -> Result<(Coefficient, Poly, Vec<Complex>)> {
    if c.coeffs.len() == 1 || c.degree() == Some(0) {
        return Ok((c.coeff(0), Poly::one(prec), Vec::new()));
    }
    let rs = roots(c, prec, RootOptions::default())?;
    let lead_idx = c.nominal_degree() - rs.degree_drop;
    let mut a = c.coeff(lead_idx);
    let mut qstar = Poly::one(prec);
    let one = Complex::one(prec);
    for z in &rs.roots {
        if z.abs() < 1u32 {
            qstar = qstar.mul(&Poly::from_complex(vec![-z.clone(), one.clone()]));
        } else {
            let inv = z.recip();
            qstar = qstar.mul(&Poly::from_complex(vec![one.clone(), -inv]));
            a = a.scale_complex(&-z.clone());
        }
    }
    Ok((a, qstar, rs.roots))
}

/// Records for every consecutive (n, n+1) present in `pairs`.
pub fn records(pairs: &BTreeMap<usize, IncompletePair>, prec: u32) -> Vec<(usize, Result<IncompleteRecord>)> {
    pairs
        .iter()
        .filter_map(|(n, p)| pairs.get(&(n + 1)).map(|p1| (*n, incomplete_record(p, p1, prec))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RmStarMethod {
    /// 1 / max |A_n|^(1/n) over the window.
    #[default]
    TrailingMax,
    /// Fit ln|A_n| = a + b n + c ln n and take e^(-b).
    LogLinearRegression,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RmStarEstimate {
    /// Positive; infinite when every A_n in the window vanishes.
    #[serde(with = "ext_real")]
    pub value: f64,
    pub window: Window,
    pub method: RmStarMethod,
    /// Nonzero A_n used.
    pub points: usize,
}

impl RmStarEstimate {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// R*_m from |A_n| over `window` (default: trailing half of the records).
pub fn estimate_rm_star(
    records: &[IncompleteRecord],
    window: Option<Window>,
    method: RmStarMethod,
) -> Result<RmStarEstimate> {
    let (first, last) = match (records.iter().map(|r| r.n).min(), records.iter().map(|r| r.n).max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::WindowTooShort { got: 0, need: 8 }),
    };
    let window = window.unwrap_or_else(|| Window::trailing_half(first, last));
    let in_win: Vec<&IncompleteRecord> = records.iter().filter(|r| window.contains(r.n)).collect();
    let nonzero: Vec<(usize, Float)> = in_win
        .iter()
        .filter(|r| !r.a.is_zero())
        .map(|r| (r.n, r.a_abs()))
        .collect();
    if !in_win.is_empty() && nonzero.is_empty() {
        return Ok(RmStarEstimate {
            value: f64::INFINITY,
            window,
            method,
            points: 0,
        });
    }
    if nonzero.len() < 8 {
        return Err(Error::WindowTooShort {
            got: nonzero.len(),
            need: 8,
        });
    }
    let value = match method {
        RmStarMethod::TrailingMax => {
            let top = nonzero.iter().map(|(n, a)| nth_root_f64(a, *n)).fold(0.0f64, f64::max);
            1.0 / top
        }
        RmStarMethod::LogLinearRegression => {
            let xs: Vec<f64> = nonzero.iter().map(|(n, _)| *n as f64).collect();
            let ws: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            let ys: Vec<f64> = nonzero.iter().map(|(_, a)| ln_f64(a)).collect();
            let [_, b, _] = fit_affine2(&xs, &ws, &ys);
            (-b).exp()
        }
    };
    Ok(RmStarEstimate {
        value,
        window,
        method,
        points: nonzero.len(),
    })
}
