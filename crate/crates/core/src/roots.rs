//! Polynomial zeros by Aberth-Ehrlich simultaneous iteration.

use std::cmp::Ordering;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{ln_f64, pi, pow2, Complex};
use crate::poly::Poly;

/// A group of computed zeros closer than the clustering radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Complex,
    pub multiplicity: usize,
}

/// Zeros of a polynomial.
///
/// `roots.len() + origin_order + degree_drop` equals the nominal degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Every computed zero, repeated according to multiplicity.
    pub roots: Vec<Complex>,
    pub clusters: Vec<Cluster>,
    /// Leading coefficients below `2^(-P/4) * max|coeff|`, treated as zero.
    pub degree_drop: usize,
    /// Zeros at the origin removed before iterating (only with `deflate_origin`).
    pub origin_order: usize,
    pub nominal_degree: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub deflate_origin: bool,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            deflate_origin: false,
            max_iterations: 4000,
        }
    }
}

fn horner_with_derivative(c: &[Complex], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut p = Complex::zero(prec);
    let mut dp = Complex::zero(prec);
    for a in c.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + a;
    }
    (p, dp)
}

fn horner(c: &[Complex], z: &Complex) -> Complex {
    let mut p = Complex::zero(z.prec());
    for a in c.iter().rev() {
        p = &(&p * z) + a;
    }
    p
}

/// Residual bound `scale * ||c||_1 * max(1, |z|)^deg`.
fn residual_ok(c: &[Complex], z: &Complex, norm1: &Float, scale: &Float) -> bool {
    let deg = c.len() - 1;
    let r = horner(c, z).abs();
    let za = z.abs();
    let growth = if za > 1u32 {
        Float::with_val(za.prec(), rug::ops::Pow::pow(&za, deg as u32))
    } else {
        Float::with_val(za.prec(), 1u32)
    };
    r <= Float::with_val(za.prec(), norm1 * scale) * growth
}

/// Fujiwara's bound on the moduli of the zeros, in f64 logs.
fn fujiwara_bound(c: &[Complex]) -> f64 {
    let d = c.len() - 1;
    let lead = ln_f64(&c[d].abs());
    let mut best = f64::NEG_INFINITY;
    for k in 1..=d {
        let a = c[d - k].abs();
        if a.is_zero() {
            continue;
        }
        let mut l = ln_f64(&a) - lead;
        if k == d {
            l -= std::f64::consts::LN_2;
        }
        best = best.max(l / k as f64);
    }
    if best == f64::NEG_INFINITY {
        return 1.0;
    }
    2.0 * best.exp()
}

/// Zeros of `q` at `prec` bits.
pub fn roots(q: &Poly, prec: u32, opts: RootOptions) -> Result<RootSet> {
    let nominal = q.nominal_degree();
    let mut c: Vec<Complex> = q.values().into_iter().map(|x| x.with_prec(prec)).collect();
    let max = c
        .iter()
        .map(Complex::abs)
        .fold(Float::new(prec), |m, a| if a > m { a } else { m });
    if max.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let drop_tol = Float::with_val(prec, &max * pow2(prec, -(prec as i32) / 4));
    let mut degree_drop = 0;
    while c.len() > 1 && c.last().unwrap().abs() <= drop_tol {
        c.pop();
        degree_drop += 1;
    }
    let mut origin_order = 0;
    if opts.deflate_origin {
        while c.len() > 1 && c[0].is_zero() {
            c.remove(0);
            origin_order += 1;
        }
    }
    let deg = c.len() - 1;
    let norm1 = c.iter().fold(Float::new(prec), |s, a| s + a.abs());
    let tol = pow2(prec, -(prec as i32) / 2);
    let mut iterations = 0;
    let found: Vec<Complex> = match deg {
        0 => Vec::new(),
        1 => vec![(-&c[0]).div(&c[1])],
        _ => {
            let bound = fujiwara_bound(&c);
            let two_pi = Float::with_val(prec, pi(prec) * 2u32);
            let mut z: Vec<Complex> = (0..deg)
                .map(|k| {
                    // Offset angle and a slight radial spread keep the start off
                    // any symmetry axis of real polynomials.
                    let ang: Float = Float::with_val(prec, &two_pi * k as u32) / deg as u32 + 0.7;
                    let rad = Float::with_val(prec, bound * (1.0 + 0.01 * k as f64 / deg as f64));
                    let (s, co) = ang.sin_cos(Float::new(prec));
                    Complex::new(Float::with_val(prec, &rad * &co), Float::with_val(prec, &rad * &s))
                })
                .collect();
            let strict = pow2(prec, -(3 * prec as i32) / 4);
            let step_tol = pow2(prec, 16 - prec as i32);
            let mut converged = false;
            while iterations < opts.max_iterations {
                iterations += 1;
                let mut max_step = Float::new(prec);
                for k in 0..deg {
                    let (p, dp) = horner_with_derivative(&c, &z[k]);
                    if p.is_zero() {
                        continue;
                    }
                    let ratio = p.div(&dp);
                    let mut sum = Complex::zero(prec);
                    for j in 0..deg {
                        if j != k {
                            let d = &z[k] - &z[j];
                            if !d.is_zero() {
                                sum = &sum + &d.recip();
                            }
                        }
                    }
                    let denom = &Complex::one(prec) - &(&ratio * &sum);
                    let w = if denom.is_zero() { ratio } else { ratio.div(&denom) };
                    if !w.is_finite() {
                        continue;
                    }
                    let za = z[k].abs();
                    let rel = Float::with_val(prec, w.abs() / if za > 1u32 { za } else { Float::with_val(prec, 1u32) });
                    if rel > max_step {
                        max_step = rel;
                    }
                    z[k] = &z[k] - &w;
                }
                if max_step <= step_tol || z.iter().all(|r| residual_ok(&c, r, &norm1, &strict)) {
                    converged = true;
                    break;
                }
            }
            if !converged && !z.iter().all(|r| residual_ok(&c, r, &norm1, &tol)) {
                return Err(Error::RaisePrecision {
                    iterations,
                    precision: prec,
                    best: z,
                });
            }
            z
        }
    };
    if let Some(bad) = found.iter().find(|r| !residual_ok(&c, r, &norm1, &tol)) {
        return Err(Error::RaisePrecision {
            iterations,
            precision: prec,
            best: vec![bad.clone()],
        });
    }
    let clusters = cluster(&found, prec);
    Ok(RootSet {
        roots: found,
        clusters,
        degree_drop,
        origin_order,
        nominal_degree: nominal,
        iterations,
    })
}

/// Group zeros closer than `2^(-P/8) * max(1, |z|)`.
pub fn cluster(roots: &[Complex], prec: u32) -> Vec<Cluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let rad = pow2(prec, -(prec as i32) / 8);
    for i in 0..n {
        for j in i + 1..n {
            let za = roots[i].abs();
            let s = if za > 1u32 { za } else { Float::with_val(prec, 1u32) };
            if roots[i].dist(&roots[j]) <= Float::with_val(prec, &rad * &s) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, v)) => v.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let mut s = Complex::zero(prec);
            for &i in &members {
                s = &s + &roots[i];
            }
            let k = Float::with_val(prec, members.len() as u32);
            Cluster {
                center: Complex::new(s.re / &k, s.im / &k),
                multiplicity: members.len(),
            }
        })
        .collect()
}

/// One entry of [`order_by_distance`].
#[derive(Clone, Debug)]
pub struct OrderedRoot {
    pub index: usize,
    pub root: Complex,
    pub distance: Float,
}

/// Sort zeros by distance from `zeta`; ties broken by the argument of the
/// zero, then by input order.
pub fn order_by_distance(roots: &[Complex], zeta: &Complex) -> Vec<OrderedRoot> {
    let mut v: Vec<OrderedRoot> = roots
        .iter()
        .enumerate()
        .map(|(index, r)| OrderedRoot {
            index,
            root: r.clone(),
            distance: r.dist(zeta),
        })
        .collect();
    v.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.root.arg().partial_cmp(&b.root.arg()).unwrap_or(Ordering::Equal))
            .then(a.index.cmp(&b.index))
    });
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{Coefficient, GaussRational};

    fn exact(v: &[i64]) -> Poly {
        Poly::from_exact(&v.iter().map(|&x| GaussRational::from_int(x)).collect::<Vec<_>>(), 256)
    }

    #[test]
    fn double_root_clusters() {
        let rs = roots(&exact(&[1, -2, 1]), 256, RootOptions::default()).unwrap();
        assert_eq!(rs.clusters.len(), 1);
        assert_eq!(rs.clusters[0].multiplicity, 2);
        assert!(rs.clusters[0].center.dist(&Complex::one(256)).to_f64() < 1e-25);
    }

    #[test]
    fn conjugate_pair() {
        let rs = roots(&exact(&[1, 0, 1]), 256, RootOptions::default()).unwrap();
        let mut ims: Vec<f64> = rs.roots.iter().map(|r| r.im.to_f64()).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-60 && (ims[1] - 1.0).abs() < 1e-60);
    }

    #[test]
    fn origin_deflation() {
        let opts = RootOptions {
            deflate_origin: true,
            ..RootOptions::default()
        };
        let rs = roots(&exact(&[0, 0, -1, 1]), 256, opts).unwrap();
        assert_eq!(rs.origin_order, 2);
        assert_eq!(rs.roots.len(), 1);
        assert!(rs.roots[0].dist(&Complex::one(256)).to_f64() < 1e-60);
    }

    #[test]
    fn degree_drop_is_counted() {
        let mut p = exact(&[-2, 1, 0]);
        p.coeffs[2] = Coefficient::from_f64(256, 1e-90, 0.0);
        let rs = roots(&p, 256, RootOptions::default()).unwrap();
        assert_eq!(rs.degree_drop, 1);
        assert_eq!(rs.roots.len() + rs.degree_drop + rs.origin_order, rs.nominal_degree);
    }

    #[test]
    fn ordering_examples() {
        let p = 128;
        let r = [Complex::from_f64(p, 2.0, 0.0), Complex::zero(p)];
        let o = order_by_distance(&r, &Complex::zero(p));
        assert_eq!(o[0].index, 1);
        let r = [Complex::from_f64(p, 1.0, 1.0), Complex::from_f64(p, 1.0, -1.0)];
        let o = order_by_distance(&r, &Complex::one(p));
        assert_eq!(o[0].index, 1);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            roots(&Poly::zero(64), 64, RootOptions::default()),
            Err(Error::ZeroPolynomial)
        ));
    }
}
