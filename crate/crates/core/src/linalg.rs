//! Kernels of small dense wide matrices.
//!
//! Exact path: fraction-free (Bareiss) row echelon over the Gaussian integers
//! after clearing denominators row by row. Float path: Householder row echelon
//! in natural column order, with one-sided Jacobi singular values for the
//! numeric kernel dimension. Both paths set the last free column to 1.

use rug::{Float, Integer, Rational};

use crate::num::{pow2, Complex, GaussRational};

/// Exact kernel vector and rank.
#[derive(Clone, Debug)]
pub struct ExactKernel {
    pub vector: Vec<GaussRational>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Float kernel vector and the echelon rank under the relative threshold.
#[derive(Clone, Debug)]
pub struct FloatKernel {
    pub vector: Vec<Complex>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: Integer,
    im: Integer,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: Integer::from(&self.re * &o.re) - Integer::from(&self.im * &o.im),
            im: Integer::from(&self.re * &o.im) + Integer::from(&self.im * &o.re),
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: Integer::from(&self.re - &o.re),
            im: Integer::from(&self.im - &o.im),
        }
    }

    /// Division known to be exact in Z[i].
    fn div_exact(&self, o: &GaussInt) -> GaussInt {
        let norm = Integer::from(o.re.square_ref()) + Integer::from(o.im.square_ref());
        // self * conj(o) / |o|^2
        let re = Integer::from(&self.re * &o.re) + Integer::from(&self.im * &o.im);
        let im = Integer::from(&self.im * &o.re) - Integer::from(&self.re * &o.im);
        debug_assert!(re.is_divisible(&norm) && im.is_divisible(&norm));
        GaussInt {
            re: re.div_exact(&norm),
            im: im.div_exact(&norm),
        }
    }

    fn to_rational(&self) -> GaussRational {
        GaussRational::new(Rational::from(&self.re), Rational::from(&self.im))
    }
}

/// Scale a row of Gaussian rationals to Gaussian integers.
fn clear_denominators(row: &[GaussRational]) -> Vec<GaussInt> {
    let mut l = Integer::from(1);
    for x in row {
        l.lcm_mut(x.re.denom());
        l.lcm_mut(x.im.denom());
    }
    row.iter()
        .map(|x| {
            let re = Rational::from(&x.re * &l);
            let im = Rational::from(&x.im * &l);
            GaussInt {
                re: re.into_numer_denom().0,
                im: im.into_numer_denom().0,
            }
        })
        .collect()
}

/// Row echelon form by fraction-free elimination; returns echelon rows and pivot columns.
fn bareiss_echelon(rows: &[Vec<GaussRational>], ncols: usize) -> (Vec<Vec<GaussInt>>, Vec<usize>) {
    let mut a: Vec<Vec<GaussInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let nrows = a.len();
    let mut prev = GaussInt {
        re: Integer::from(1),
        im: Integer::new(),
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = a[r][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[r][j]));
                a[i][j] = t.div_exact(&prev);
            }
            a[i][c] = GaussInt {
                re: Integer::new(),
                im: Integer::new(),
            };
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Exact rank of a Gaussian-rational matrix.
pub fn exact_rank(rows: &[Vec<GaussRational>], ncols: usize) -> usize {
    bareiss_echelon(rows, ncols).1.len()
}

/// Exact kernel vector with the last free column set to 1. `None` when the
/// matrix has full column rank.
pub fn exact_kernel(rows: &[Vec<GaussRational>], ncols: usize) -> Option<ExactKernel> {
    let (ech, pivots) = bareiss_echelon(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let last_free = *free.last()?;
    let mut x = vec![GaussRational::zero(); ncols];
    x[last_free] = GaussRational::one();
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = GaussRational::zero();
        for j in pc + 1..ncols {
            if !x[j].is_zero() && !ech[i][j].is_zero() {
                acc = &acc + &(&ech[i][j].to_rational() * &x[j]);
            }
        }
        x[pc] = (-&acc).div(&ech[i][pc].to_rational()).expect("pivot is nonzero");
    }
    Some(ExactKernel {
        vector: x,
        rank: pivots.len(),
        pivots,
    })
}

fn col_norm(a: &[Vec<Complex>], c: usize, from: usize, prec: u32) -> Float {
    let mut s = Float::new(prec);
    for row in &a[from..] {
        s += row[c].norm_sqr();
    }
    s.sqrt()
}

/// Householder row echelon in natural column order. A column whose residual
/// norm is at most `2^(-prec/4)` times the largest column norm becomes free.
pub fn float_kernel(rows: &[Vec<Complex>], ncols: usize, prec: u32) -> Option<FloatKernel> {
    let mut a: Vec<Vec<Complex>> = rows.iter().map(|r| r.iter().map(|x| x.with_prec(prec)).collect()).collect();
    let nrows = a.len();
    let max_norm = (0..ncols)
        .map(|c| col_norm(&a, c, 0, prec))
        .fold(Float::new(prec), |m, x| if x > m { x } else { m });
    let tol = max_norm * pow2(prec, -(prec as i32) / 4);
    let mut pivots = Vec::new();
    let mut free = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            free.push(c);
            continue;
        }
        let norm = col_norm(&a, c, r, prec);
        if norm <= tol || norm.is_zero() {
            free.push(c);
            continue;
        }
        let x0 = a[r][c].clone();
        let x0abs = x0.abs();
        let phase = if x0abs.is_zero() {
            Complex::one(prec)
        } else {
            Complex::new(Float::with_val(prec, &x0.re / &x0abs), Float::with_val(prec, &x0.im / &x0abs))
        };
        let alpha = -phase.scale(&norm);
        let mut v: Vec<Complex> = (r..nrows).map(|i| a[i][c].clone()).collect();
        v[0] = &v[0] - &alpha;
        let vnorm2 = v.iter().fold(Float::new(prec), |s, x| s + x.norm_sqr());
        for j in c..ncols {
            // w = v^H a_j
            let mut w = Complex::zero(prec);
            for (k, vk) in v.iter().enumerate() {
                w = &w + &(&vk.conj() * &a[r + k][j]);
            }
            let f = w.scale(&(Float::with_val(prec, 2u32) / &vnorm2));
            for (k, vk) in v.iter().enumerate() {
                a[r + k][j] = &a[r + k][j] - &(&f * vk);
            }
        }
        a[r][c] = alpha;
        for row in a.iter_mut().skip(r + 1) {
            row[c] = Complex::zero(prec);
        }
        pivots.push(c);
        r += 1;
    }
    let last_free = *free.last()?;
    let mut x = vec![Complex::zero(prec); ncols];
    x[last_free] = Complex::one(prec);
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = Complex::zero(prec);
        for j in pc + 1..ncols {
            if !x[j].is_zero() {
                acc = &acc + &(&a[i][j] * &x[j]);
            }
        }
        x[pc] = (-acc).div(&a[i][pc]);
    }
    Some(FloatKernel {
        vector: x,
        rank: pivots.len(),
        pivots,
    })
}

/// Singular values (unsorted, one per column) by one-sided Jacobi rotations.
pub fn singular_values(rows: &[Vec<Complex>], ncols: usize, prec: u32) -> Vec<Float> {
    // Work on columns.
    let mut cols: Vec<Vec<Complex>> = (0..ncols)
        .map(|c| rows.iter().map(|r| r[c].with_prec(prec)).collect())
        .collect();
    let eps = pow2(prec, 8 - prec as i32);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let alpha = cols[p].iter().fold(Float::new(prec), |s, x| s + x.norm_sqr());
                let beta = cols[q].iter().fold(Float::new(prec), |s, x| s + x.norm_sqr());
                let mut gamma = Complex::zero(prec);
                for (x, y) in cols[p].iter().zip(&cols[q]) {
                    gamma = &gamma + &(&x.conj() * y);
                }
                let g = gamma.abs();
                if g.is_zero() {
                    continue;
                }
                let scale = Float::with_val(prec, &alpha * &beta).sqrt();
                if g <= Float::with_val(prec, &eps * &scale) {
                    continue;
                }
                rotated = true;
                // Rotate the phase of column q so that a_p^H a_q is real positive.
                let ph = Complex::new(Float::with_val(prec, &gamma.re / &g), -Float::with_val(prec, &gamma.im / &g));
                for y in cols[q].iter_mut() {
                    *y = &*y * &ph;
                }
                let zeta = Float::with_val(prec, &beta - &alpha) / (Float::with_val(prec, 2u32) * &g);
                let root = (Float::with_val(prec, zeta.square_ref()) + 1u32).sqrt();
                let t = {
                    let den = Float::with_val(prec, zeta.abs_ref()) + &root;
                    let t = Float::with_val(prec, 1u32) / den;
                    if zeta.is_sign_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let c = Float::with_val(prec, 1u32) / (Float::with_val(prec, t.square_ref()) + 1u32).sqrt();
                let s = Float::with_val(prec, &c * &t);
                for k in 0..cols[p].len() {
                    let ap = cols[p][k].clone();
                    let aq = cols[q][k].clone();
                    cols[p][k] = &ap.scale(&c) - &aq.scale(&s);
                    cols[q][k] = &ap.scale(&s) + &aq.scale(&c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|c| c.iter().fold(Float::new(prec), |s, x| s + x.norm_sqr()).sqrt())
        .collect()
}

/// Number of singular values at most `2^(-prec/4)` times the largest.
pub fn numeric_nullity(rows: &[Vec<Complex>], ncols: usize, prec: u32) -> usize {
    let sv = singular_values(rows, ncols, prec);
    let max = sv.iter().fold(Float::new(prec), |m, x| if *x > m { x.clone() } else { m });
    if max.is_zero() {
        return ncols;
    }
    let tol = max * pow2(prec, -(prec as i32) / 4);
    sv.iter().filter(|s| **s <= tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(v: i64) -> GaussRational {
        GaussRational::from_int(v)
    }

    fn to_float(rows: &[Vec<GaussRational>], prec: u32) -> Vec<Vec<Complex>> {
        rows.iter().map(|r| r.iter().map(|x| x.to_complex(prec)).collect()).collect()
    }

    #[test]
    fn exact_kernel_of_single_row() {
        let rows = vec![vec![gr(-1), gr(-1)]];
        let k = exact_kernel(&rows, 2).unwrap();
        assert_eq!(k.vector, vec![gr(-1), gr(1)]);
        assert_eq!(k.rank, 1);
    }

    #[test]
    fn exact_kernel_with_rational_entries() {
        let rows = vec![
            vec![GaussRational::from_ratio(1, 2), gr(1), gr(0)],
            vec![gr(0), GaussRational::from_ratio(1, 3), gr(1)],
        ];
        let k = exact_kernel(&rows, 3).unwrap();
        for row in &rows {
            let s = row.iter().zip(&k.vector).fold(GaussRational::zero(), |a, (x, y)| &a + &(x * y));
            assert!(s.is_zero());
        }
        assert_eq!(k.vector[2], gr(1));
    }

    #[test]
    fn rank_deficient_duplicate_rows() {
        let rows = vec![vec![gr(1), gr(2), gr(3)], vec![gr(2), gr(4), gr(6)]];
        assert_eq!(exact_rank(&rows, 3), 1);
        assert_eq!(numeric_nullity(&to_float(&rows, 128), 3, 128), 2);
    }

    #[test]
    fn float_kernel_matches_exact() {
        let rows = vec![
            vec![gr(3), gr(-1), gr(2), gr(5)],
            vec![gr(1), gr(4), gr(-2), gr(0)],
            vec![GaussRational::i(), gr(1), gr(1), gr(7)],
        ];
        let ex = exact_kernel(&rows, 4).unwrap();
        let fl = float_kernel(&to_float(&rows, 200), 4, 200).unwrap();
        for (a, b) in ex.vector.iter().zip(&fl.vector) {
            assert!(a.to_complex(200).dist(b).to_f64() < 1e-50);
        }
    }

    #[test]
    fn jacobi_singular_values_of_diagonal() {
        let rows = vec![vec![gr(3), gr(0), gr(0)], vec![gr(0), gr(4), gr(0)]];
        let mut sv: Vec<f64> = singular_values(&to_float(&rows, 128), 3, 128).iter().map(Float::to_f64).collect();
        sv.sort_by(f64::total_cmp);
        assert_eq!(sv, vec![0.0, 3.0, 4.0]);
    }

    #[test]
    fn all_zero_matrix_has_full_nullity() {
        let rows = vec![vec![gr(0), gr(0)]];
        assert_eq!(numeric_nullity(&to_float(&rows, 64), 2, 64), 2);
        assert_eq!(exact_rank(&rows, 2), 0);
    }
}
