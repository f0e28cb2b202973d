//! Type-II Hermite-Padé denominators and numerators for one row element.
//!
//! For a system (f, m) and index n the common denominator q, deg q <= |m|,
//! solves the |m| x (|m|+1) homogeneous system
//!
//! ```text
//! [z^j](q f_k) = sum_i q_i phi_{j-i,k} = 0,   j = n-m_k+1 ..= n,   k = 1..=d
//! ```
//!
//! and the numerators are the truncations p_k = (q f_k) mod z^(n-m_k+1).

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::num::{float_hex, pow2, Coefficient, Complex, GaussRational};
use crate::poly::Poly;
use crate::roots::{roots, RootOptions};
use crate::series::{MultiIndex, PowerSeries, SeriesSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Leading significant coefficient equal to 1.
    #[default]
    Monic,
    /// Sum of coefficient moduli equal to 1.
    UnitCoeffSum,
}

/// Which elimination to use for the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Exact when every entry is exact, float otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

/// Row block k holds `[z^j](z^i f_k)` for `j = n-m_k+1..=n`, `i = 0..=|m|`.
#[derive(Clone, Debug)]
pub struct ConstraintMatrix {
    pub n: usize,
    pub m: MultiIndex,
    pub rows: Vec<Vec<Coefficient>>,
    /// (component k, coefficient index j) for each row.
    pub labels: Vec<(usize, usize)>,
}

impl ConstraintMatrix {
    pub fn ncols(&self) -> usize {
        self.m.total() + 1
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().flatten().all(Coefficient::is_exact)
    }

    pub fn max_entry(&self, prec: u32) -> Float {
        self.rows
            .iter()
            .flatten()
            .map(Coefficient::abs)
            .fold(Float::new(prec), |m, a| if a > m { a } else { m })
    }

    /// max_rows |row . q|.
    pub fn residual(&self, q: &Poly, prec: u32) -> Float {
        let mut worst = Float::new(prec);
        for row in &self.rows {
            let mut acc = Complex::zero(prec);
            for (i, e) in row.iter().enumerate() {
                if let Some(qi) = q.coeffs.get(i) {
                    acc = &acc + &(&e.value * &qi.value);
                }
            }
            let a = acc.abs();
            if a > worst {
                worst = a;
            }
        }
        worst
    }
}

pub fn build_constraint_matrix(system: &SeriesSystem, n: usize, prec: u32) -> Result<ConstraintMatrix> {
    let m = system.m();
    if n < m.max_entry() {
        return Err(Error::IndexBelowRowStart { n, min: m.max_entry() });
    }
    let ncols = m.total() + 1;
    let mut rows = Vec::with_capacity(m.total());
    let mut labels = Vec::with_capacity(m.total());
    for (k, (f, &mk)) in system.components().iter().zip(m.entries()).enumerate() {
        for j in n + 1 - mk..=n {
            rows.push(
                (0..ncols)
                    .map(|i| if j >= i { f.coeff(j - i, prec) } else { Coefficient::zero(prec) })
                    .collect(),
            );
            labels.push((k, j));
        }
    }
    Ok(ConstraintMatrix {
        n,
        m: m.clone(),
        rows,
        labels,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenominatorSolution {
    pub q: Poly,
    pub nullspace_dim: usize,
    /// max |row . q| over the constraint rows.
    #[serde(with = "float_hex")]
    pub residual: Float,
    pub normalization: Normalization,
    /// Solved by exact elimination.
    pub exact_path: bool,
    /// The constraint matrix was identically zero.
    pub degenerate: bool,
}

impl DenominatorSolution {
    pub fn is_unique(&self) -> bool {
        self.nullspace_dim == 1
    }
}

/// Normalize a nonzero polynomial.
///
/// Monic divides by the highest-index coefficient whose modulus exceeds
/// `2^(-P/4) * max|q_i|` and zeroes everything above it, so a degree drop
/// is visible in the result.
pub fn normalize(q: &Poly, mode: Normalization, prec: u32) -> Poly {
    match mode {
        Normalization::Monic => {
            let lead = if q.is_exact() {
                q.degree()
            } else {
                let tol = q.norm_inf() * pow2(prec, -(prec as i32) / 4);
                q.coeffs.iter().rposition(|c| c.abs() > tol)
            };
            let Some(lead) = lead else { return q.clone() };
            let l = q.coeffs[lead].clone();
            let mut out: Vec<Coefficient> = q.coeffs[..=lead].iter().map(|c| c.div(&l)).collect();
            out[lead] = Coefficient::one(prec);
            out.resize(q.coeffs.len(), Coefficient::zero(prec));
            Poly::new(out)
        }
        Normalization::UnitCoeffSum => {
            let s = q.norm1();
            if s.is_zero() {
                return q.clone();
            }
            let inv = Complex::from_real(Float::with_val(prec, 1u32) / s);
            Poly::new(q.coeffs.iter().map(|c| c.scale_complex(&inv)).collect())
        }
    }
}

pub fn solve_denominator(
    matrix: &ConstraintMatrix,
    normalization: Normalization,
    method: SolveMethod,
    prec: u32,
) -> DenominatorSolution {
    let ncols = matrix.ncols();
    if matrix.rows.iter().flatten().all(Coefficient::is_zero) {
        return DenominatorSolution {
            q: Poly::one(prec),
            nullspace_dim: ncols,
            residual: Float::new(prec),
            normalization,
            exact_path: matrix.is_exact(),
            degenerate: true,
        };
    }
    let use_exact = match method {
        SolveMethod::Exact => matrix.is_exact(),
        SolveMethod::Auto => matrix.is_exact(),
        SolveMethod::Float => false,
    };
    let (q, nullspace_dim) = if use_exact {
        let rows: Vec<Vec<GaussRational>> = matrix
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.exact.clone().expect("exact entry")).collect())
            .collect();
        let k = linalg::exact_kernel(&rows, ncols).expect("wide matrix has a kernel");
        (Poly::from_exact(&k.vector, prec), ncols - k.rank)
    } else {
        let rows: Vec<Vec<Complex>> = matrix
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.value.with_prec(prec)).collect())
            .collect();
        let k = linalg::float_kernel(&rows, ncols, prec).expect("wide matrix has a kernel");
        let nullity = linalg::numeric_nullity(&rows, ncols, prec).max(1);
        (Poly::from_complex(k.vector), nullity)
    };
    let q = normalize(&q, normalization, prec);
    let residual = matrix.residual(&q, prec);
    DenominatorSolution {
        q,
        nullspace_dim,
        residual,
        normalization,
        exact_path: use_exact,
        degenerate: false,
    }
}

/// p_k = (q f_k) truncated to degree n - m_k.
pub fn numerators(system: &SeriesSystem, q: &Poly, n: usize, prec: u32) -> Vec<Poly> {
    system
        .components()
        .iter()
        .zip(system.m().entries())
        .map(|(f, &mk)| product_window(f, q, 0, n - mk, prec))
        .collect()
}

/// Coefficients lo..=hi of q f, as a polynomial whose index 0 is degree 0.
fn product_window(f: &PowerSeries, q: &Poly, lo: usize, hi: usize, prec: u32) -> Poly {
    let mut out = vec![Coefficient::zero(prec); hi + 1];
    for (j, slot) in out.iter_mut().enumerate().skip(lo) {
        let mut acc = Coefficient::zero(prec);
        for (i, qi) in q.coeffs.iter().enumerate() {
            if i > j || qi.is_zero() {
                continue;
            }
            acc = &acc + &(qi * &f.coeff(j - i, prec));
        }
        *slot = acc;
    }
    Poly::new(out)
}

/// max over k and j in the interpolation window of |[z^j](q f_k - p_k)|.
pub fn interpolation_residual(system: &SeriesSystem, q: &Poly, n: usize, prec: u32) -> Float {
    let mut worst = Float::new(prec);
    for (f, &mk) in system.components().iter().zip(system.m().entries()) {
        if mk == 0 {
            continue;
        }
        let w = product_window(f, q, n + 1 - mk, n, prec);
        for c in &w.coeffs[n + 1 - mk..] {
            let a = c.abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst
}

/// One element of a row sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HPApproximant {
    pub n: usize,
    pub m: MultiIndex,
    pub denominator: DenominatorSolution,
    pub numerators: Vec<Poly>,
    /// Common zeros of q and every numerator have been divided out.
    pub reduced: bool,
    /// Order of the common zero at the origin removed by [`reduce`].
    pub origin_order: usize,
    /// Largest constraint-matrix entry, the scale of the residual bound.
    #[serde(with = "float_hex")]
    pub matrix_scale: Float,
    /// Interpolation residual of (q, p) over the constraint window.
    #[serde(with = "float_hex")]
    pub interpolation_residual: Float,
}

impl HPApproximant {
    pub fn q(&self) -> &Poly {
        &self.denominator.q
    }

    /// `interpolation_residual <= 2^(-P/2) * matrix_scale * max(1, ||q||_inf)`.
    pub fn residual_ok(&self, prec: u32) -> bool {
        let qn = self.q().norm_inf();
        let qs = if qn > 1u32 { qn } else { Float::with_val(prec, 1u32) };
        let tol = pow2(prec, -(prec as i32) / 2) * &self.matrix_scale * qs;
        self.interpolation_residual <= tol
    }
}

/// Build and solve the row element at index n.
pub fn hp_approximant(
    system: &SeriesSystem,
    n: usize,
    normalization: Normalization,
    method: SolveMethod,
    prec: u32,
) -> Result<HPApproximant> {
    let matrix = build_constraint_matrix(system, n, prec)?;
    let denominator = solve_denominator(&matrix, normalization, method, prec);
    let numerators = numerators(system, &denominator.q, n, prec);
    let interpolation_residual = interpolation_residual(system, &denominator.q, n, prec);
    Ok(HPApproximant {
        n,
        m: system.m().clone(),
        matrix_scale: matrix.max_entry(prec),
        denominator,
        numerators,
        reduced: false,
        origin_order: 0,
        interpolation_residual,
    })
}

/// Scalar Padé approximant of type (n - m, m).
pub fn pade(
    f: &PowerSeries,
    n: usize,
    m: usize,
    normalization: Normalization,
    method: SolveMethod,
    prec: u32,
) -> Result<HPApproximant> {
    if m == 0 || n < m {
        return Err(Error::IndexBelowRowStart { n, min: m.max(1) });
    }
    let system = SeriesSystem::scalar(f.clone(), m)?;
    hp_approximant(&system, n, normalization, method, prec)
}

/// Row elements for every n in `range`, solved in parallel.
pub fn row_sequence(
    system: &SeriesSystem,
    range: std::ops::RangeInclusive<usize>,
    normalization: Normalization,
    method: SolveMethod,
    prec: u32,
) -> Vec<(usize, Result<HPApproximant>)> {
    system.warm(*range.end(), prec);
    let ns: Vec<usize> = range.collect();
    ns.par_iter()
        .map(|&n| (n, hp_approximant(system, n, normalization, method, prec)))
        .collect()
}

fn vanishes(c: &Coefficient, scale: &Float, prec: u32) -> bool {
    c.is_zero() || (!c.is_exact() && c.abs() <= Float::with_val(prec, scale * pow2(prec, -(prec as i32) / 2)))
}

/// Divide out common zeros of q and all numerators.
///
/// Zeros at the origin are detected coefficient-wise and recorded in
/// `origin_order`. Other common zeros are the clusters of q's zeros where
/// every numerator is below `2^(-P/8) * ||p_k||_1 * max(1,|z|)^deg p_k`.
pub fn reduce(approx: &HPApproximant, prec: u32) -> Result<HPApproximant> {
    let mut q = approx.q().clone();
    let mut ps = approx.numerators.clone();
    let mut origin = approx.origin_order;
    loop {
        let qs = q.norm_inf();
        if q.coeffs.len() <= 1 || !vanishes(&q.coeffs[0], &qs, prec) {
            break;
        }
        if !ps.iter().all(|p| vanishes(&p.coeff(0), &p.norm_inf(), prec)) {
            break;
        }
        q = q.shift_down(1);
        ps = ps.iter().map(|p| p.shift_down(1)).collect();
        origin += 1;
    }
    let tol = pow2(prec, -(prec as i32) / 8);
    if q.degree().unwrap_or(0) > 0 {
        let rs = roots(&q, prec, RootOptions::default())?;
        for cl in &rs.clusters {
            for _ in 0..cl.multiplicity {
                let z = &cl.center;
                let za = z.abs();
                let grow = if za > 1u32 { za } else { Float::with_val(prec, 1u32) };
                let common = ps.iter().all(|p| {
                    let deg = p.degree().unwrap_or(0) as u32;
                    let bound = Float::with_val(prec, &tol * p.norm1()) * Float::with_val(prec, rug::ops::Pow::pow(&grow, deg));
                    p.is_zero() || p.eval(z).abs() <= bound
                });
                if !common {
                    break;
                }
                let exact_root = GaussRational::from_complex(z).filter(|_| q.is_exact());
                q = match exact_root.as_ref().and_then(|r| q.deflate_exact(r)) {
                    Some((d, rem)) if rem.is_zero() => d,
                    _ => q.deflate(z).0,
                };
                ps = ps.iter().map(|p| if p.is_zero() { p.clone() } else { p.deflate(z).0 }).collect();
            }
        }
    }
    let lead = normalize(&q, approx.denominator.normalization, prec);
    // Rescale the numerators by the same factor applied to q.
    let factor = match (q.coeffs.iter().rposition(|c| !c.is_zero()), lead.coeffs.iter().rposition(|c| !c.is_zero())) {
        (Some(i), Some(_)) if !lead.coeffs[i].is_zero() => lead.coeffs[i].div(&q.coeffs[i]),
        _ => Coefficient::one(prec),
    };
    let ps = ps.iter().map(|p| p.scale(&factor)).collect();
    let mut out = approx.clone();
    out.denominator.q = lead;
    out.numerators = ps;
    out.reduced = true;
    out.origin_order = origin;
    Ok(out)
}
