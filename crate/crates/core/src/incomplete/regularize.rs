//! Regularizing majorants of |alpha_n| r^n.
//!
//! alpha*_n is the exponential of the least concave majorant of
//! y_n = ln|alpha_n| + n ln r. The logs are rounded once to binary floats and
//! then converted to rationals exactly, so the hull, the majorization and the
//! concavity checks are exact statements about those rationals.

use std::collections::BTreeMap;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HullForm {
    /// Majorant of ln(alpha_n r^n).
    #[default]
    Plain,
    /// Majorant of ln(alpha_n r^n / n!), multiplied back by n!.
    Factorial,
}

/// Outcome of the exact hull checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullChecks {
    /// y_n <= h_n everywhere on the window.
    pub majorizes: bool,
    /// Second differences of h are <= 0.
    pub concave: bool,
    /// Every contact index has y_n = h_n.
    pub contact_exact: bool,
    /// Both halves of the window contain a contact index.
    pub contact_each_half: bool,
    /// max |alpha*_{n+1}/alpha*_n - 1| over the trailing half.
    pub ratio_drift: f64,
}

impl HullChecks {
    pub fn exact_properties_hold(&self) -> bool {
        self.majorizes && self.concave && self.contact_exact && self.contact_each_half
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Regularization {
    pub window: Window,
    pub scale_r: f64,
    pub form: HullForm,
    /// ln alpha*_n for every integer n of the window.
    pub log_alpha_star: BTreeMap<usize, f64>,
    /// ln(|alpha_n| r^n) at the nonzero inputs.
    pub log_alpha: BTreeMap<usize, f64>,
    pub contact_set: Vec<usize>,
    pub c_bound: f64,
    /// Indices with alpha_n = 0, left out of the hull.
    pub zero_indices: Vec<usize>,
    pub checks: HullChecks,
}

impl Regularization {
    pub fn alpha_star(&self, n: usize) -> Option<f64> {
        self.log_alpha_star.get(&n).map(|l| l.exp())
    }

    pub fn is_contact(&self, n: usize) -> bool {
        self.contact_set.binary_search(&n).is_ok()
    }
}

fn ln_factorial(n: usize, prec: u32) -> Float {
    Float::with_val(prec, n as u32 + 1).ln_gamma()
}

/// Upper hull of points with strictly increasing x.
fn upper_hull(pts: &[(i64, Rational)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]]);
            let c = &pts[i];
            // Drop b when it lies on or below the chord from a to c.
            let lhs = Rational::from(&b.1 - &a.1) * (c.0 - a.0);
            let rhs = Rational::from(&c.1 - &a.1) * (b.0 - a.0);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Least concave majorant regularization of |alpha_n| r^n.
pub fn regularize(alpha: &BTreeMap<usize, Float>, scale_r: f64, form: HullForm) -> Result<Regularization> {
    let (Some(&first), Some(&last)) = (alpha.keys().next(), alpha.keys().next_back()) else {
        return Err(Error::Degenerate("empty sequence".into()));
    };
    let prec = alpha.values().next().unwrap().prec().max(64);
    let ln_r = Float::with_val(prec, scale_r).ln();
    let zero_indices: Vec<usize> = alpha.iter().filter(|(_, a)| a.is_zero()).map(|(n, _)| *n).collect();
    let mut pts: Vec<(i64, Rational)> = Vec::new();
    let mut log_alpha = BTreeMap::new();
    for (&n, a) in alpha.iter().filter(|(_, a)| !a.is_zero()) {
        let mut y = Float::with_val(prec, a.abs_ref()).ln() + Float::with_val(prec, &ln_r * n as u32);
        log_alpha.insert(n, y.to_f64());
        if form == HullForm::Factorial {
            y -= ln_factorial(n, prec);
        }
        let exact = y
            .to_rational()
            .ok_or_else(|| Error::Degenerate(format!("non-finite log magnitude at n = {n}")))?;
        pts.push((n as i64, exact));
    }
    if pts.is_empty() {
        return Err(Error::Degenerate("every alpha_n is zero".into()));
    }
    let hull = upper_hull(&pts);
    let y_at: BTreeMap<i64, &Rational> = pts.iter().map(|(x, y)| (*x, y)).collect();
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    let mut h: BTreeMap<i64, Rational> = BTreeMap::new();
    for w in hull.windows(2) {
        let ((xa, ya), (xb, yb)) = (&pts[w[0]], &pts[w[1]]);
        let slope = Rational::from(yb - ya) / (xb - xa);
        for x in *xa..=*xb {
            h.insert(x, Rational::from(&slope * (x - xa)) + ya);
        }
    }
    if hull.len() == 1 {
        h.insert(lo, pts[hull[0]].1.clone());
    }
    let majorizes = pts.iter().all(|(x, y)| *y <= h[x]);
    let concave = (lo + 1..hi).all(|x| {
        let d2 = Rational::from(&h[&(x + 1)] - &h[&x]) - Rational::from(&h[&x] - &h[&(x - 1)]);
        d2 <= 0
    });
    let contact_set: Vec<usize> = pts.iter().filter(|(x, y)| *y == h[x]).map(|(x, _)| *x as usize).collect();
    let contact_exact = contact_set.iter().all(|n| *y_at[&(*n as i64)] == h[&(*n as i64)]);
    let window = Window { start: first, end: last };
    let mid = first + (last - first) / 2;
    let contact_each_half = contact_set.iter().any(|&n| n <= mid) && contact_set.iter().any(|&n| n > mid || last == first);
    let log_alpha_star: BTreeMap<usize, f64> = h
        .iter()
        .map(|(x, v)| {
            let mut l = Float::with_val(prec, v);
            if form == HullForm::Factorial {
                l += ln_factorial(*x as usize, prec);
            }
            (*x as usize, l.to_f64())
        })
        .collect();
    let tail = Window::trailing_half(lo as usize, hi as usize);
    let ratio_drift = log_alpha_star
        .iter()
        .zip(log_alpha_star.iter().skip(1))
        .filter(|((n, _), _)| tail.contains(**n))
        .map(|((_, a), (_, b))| ((b - a).exp() - 1.0).abs())
        .fold(0.0f64, f64::max);
    Ok(Regularization {
        window,
        scale_r,
        form,
        log_alpha_star,
        log_alpha,
        contact_set,
        c_bound: 1.0,
        zero_indices,
        checks: HullChecks {
            majorizes,
            concave,
            contact_exact,
            contact_each_half,
            ratio_drift,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f: impl Fn(usize) -> f64, range: std::ops::RangeInclusive<usize>) -> BTreeMap<usize, Float> {
        range.map(|n| (n, Float::with_val(128, f(n)))).collect()
    }

    #[test]
    fn constant_sequence_touches_everywhere() {
        let r = regularize(&seq(|_| 1.0, 1..=20), 1.0, HullForm::Plain).unwrap();
        assert_eq!(r.contact_set, (1..=20).collect::<Vec<_>>());
        assert!(r.log_alpha_star.values().all(|v| v.abs() < 1e-15));
        assert!(r.checks.exact_properties_hold());
    }

    #[test]
    fn alternation_hull() {
        let r = regularize(&seq(|n| if n % 2 == 1 { 1.0 } else { 0.5 }, 1..=21), 1.0, HullForm::Plain).unwrap();
        assert_eq!(r.contact_set, (1..=21).step_by(2).collect::<Vec<_>>());
        assert!(r.log_alpha_star.values().all(|v| v.abs() < 1e-15));
        assert!(r.checks.exact_properties_hold());
    }

    #[test]
    fn geometric_scaled_to_one() {
        let r = regularize(&seq(|n| (n as f64).powi(2) * 0.5f64.powi(n as i32), 10..=80), 2.0, HullForm::Plain).unwrap();
        assert!(r.checks.exact_properties_hold());
        assert!(r.checks.ratio_drift < 0.1);
        let f = regularize(&seq(|n| 0.5f64.powi(n as i32), 10..=40), 2.0, HullForm::Factorial).unwrap();
        assert!(f.checks.majorizes && f.checks.concave);
    }

    #[test]
    fn zeros_are_skipped() {
        let mut a = seq(|_| 1.0, 1..=10);
        a.insert(5, Float::new(128));
        let r = regularize(&a, 1.0, HullForm::Plain).unwrap();
        assert_eq!(r.zero_indices, vec![5]);
        assert!(regularize(&seq(|_| 0.0, 1..=4), 1.0, HullForm::Plain).is_err());
    }
}
