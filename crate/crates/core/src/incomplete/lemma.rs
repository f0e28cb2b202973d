//! Grid probes of the growth bounds for incomplete approximants.
//!
//! After rescaling z = r w with r the estimated R*_m, the probes report
//!
//! ```text
//! outside:  max |p_n(r w)| / (alpha*_n |w|^n),            |w| = e^delta
//! inside:   max |(q_n F - p_n)(r w)| / (alpha*_n |w|^n),  |w| <= e^-delta
//! ```
//!
//! for n in the contact set. A bounded running maximum is evidence, not proof.

use std::collections::BTreeMap;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::num::{nth_root_f64, Complex};
use crate::series::PowerSeries;

use super::{IncompletePair, Regularization};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeRegion {
    Outside { delta: f64 },
    Inside { delta: f64 },
    /// Points of modulus e^delta within angle delta of arg z0.
    BoundaryArc { z0: (f64, f64), delta: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaProbe {
    pub region: ProbeRegion,
    /// Grid points per n after exclusions.
    pub samples: usize,
    /// Max ratio per probed n.
    pub per_n: BTreeMap<usize, f64>,
    pub running_max: f64,
    /// Grid points dropped for lying near an excluded point.
    pub excluded: usize,
    /// Modulus in the w-plane actually used for the inside probe.
    pub inside_radius: Option<f64>,
}

const ANGLES: usize = 64;
const TAIL_TERMS: usize = 160;

fn grid(region: ProbeRegion, inside_radius: f64) -> Vec<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    match region {
        ProbeRegion::Outside { delta } => (0..ANGLES).map(|k| (delta.exp(), tau * k as f64 / ANGLES as f64)).collect(),
        ProbeRegion::Inside { .. } => [0.5, 1.0]
            .iter()
            .flat_map(|s| (0..ANGLES).map(move |k| (s * inside_radius, tau * (k as f64 + 0.5) / ANGLES as f64)))
            .collect(),
        ProbeRegion::BoundaryArc { z0, delta } => {
            let a0 = z0.1.atan2(z0.0);
            (0..=16).map(|k| (delta.exp(), a0 - delta + 2.0 * delta * k as f64 / 16.0)).collect()
        }
    }
}

/// Coefficients n+1 ..= n+TAIL_TERMS of q F.
fn remainder_coeffs(q: &crate::poly::Poly, f: &PowerSeries, n: usize, prec: u32) -> Vec<Complex> {
    (n + 1..=n + TAIL_TERMS)
        .map(|j| {
            let mut acc = Complex::zero(prec);
            for (i, qi) in q.coeffs.iter().enumerate() {
                if i <= j && !qi.is_zero() {
                    acc = &acc + &(&qi.value * &f.coeff(j - i, prec).value);
                }
            }
            acc
        })
        .collect()
}

/// Probe the growth ratio over `region` for n in the contact set.
/// Grid points within `exclusion` of any point in `exclude` are skipped.
pub fn lemma_probe(
    pairs: &BTreeMap<usize, IncompletePair>,
    f: &PowerSeries,
    reg: &Regularization,
    region: ProbeRegion,
    exclude: &[Complex],
    exclusion: f64,
    prec: u32,
) -> LemmaProbe {
    let r = reg.scale_r;
    let rf = Float::with_val(prec, r);
    let ns: Vec<usize> = reg.contact_set.iter().copied().filter(|n| pairs.contains_key(n)).collect();

    // The inside probe sums the tail of q F, so it stays inside the observed
    // convergence radius of that tail.
    let inside_radius = match region {
        ProbeRegion::Inside { delta } => {
            let mut rad = (-delta).exp();
            if let Some(&n) = ns.last() {
                let c = remainder_coeffs(&pairs[&n].q, f, n, prec);
                let j = n + TAIL_TERMS;
                let root = nth_root_f64(&c[TAIL_TERMS - 1].abs(), j);
                if root > 0.0 {
                    rad = rad.min(0.9 / (root * r));
                }
            }
            Some(rad)
        }
        _ => None,
    };
    let pts = grid(region, inside_radius.unwrap_or(1.0));
    let mut kept = Vec::new();
    let mut excluded = 0;
    for (rho, phi) in pts {
        let w = Complex::from_f64(prec, rho * phi.cos(), rho * phi.sin());
        let z = w.scale(&rf);
        if exclude.iter().any(|e| z.dist(e).to_f64() < exclusion) {
            excluded += 1;
        } else {
            kept.push((w, z));
        }
    }
    let mut per_n = BTreeMap::new();
    for &n in &ns {
        let Some(astar) = reg.alpha_star(n) else { continue };
        let pair = &pairs[&n];
        let tail = matches!(region, ProbeRegion::Inside { .. }).then(|| remainder_coeffs(&pair.q, f, n, prec));
        let mut worst = 0.0f64;
        for (w, z) in &kept {
            let num = match &tail {
                Some(c) => {
                    let mut acc = Complex::zero(prec);
                    for a in c.iter().rev() {
                        acc = &(&acc * z) + a;
                    }
                    (&acc * &z.powi(n as u32 + 1)).abs()
                }
                None => pair.p.eval(z).abs(),
            };
            let den = astar * w.abs().to_f64().powi(n as i32);
            let ratio = num.to_f64() / den;
            if ratio.is_finite() {
                worst = worst.max(ratio);
            }
        }
        per_n.insert(n, worst);
    }
    let running_max = per_n.values().copied().fold(0.0f64, f64::max);
    LemmaProbe {
        region,
        samples: kept.len(),
        per_n,
        running_max,
        excluded,
        inside_radius,
    }
}
