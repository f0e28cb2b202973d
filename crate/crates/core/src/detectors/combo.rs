//! Singular points of polynomial combinations F = sum p_k f_k.
//!
//! With deg p_k <= m_k - m*, the pair (sum p_k p_{n,k}, q_n) is an incomplete
//! approximant of F of type (n, |m|, m*), so the incomplete machinery runs on
//! F with the system's own denominators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_affine2;
use crate::hp::{row_sequence, HPApproximant, Normalization, SolveMethod};
use crate::incomplete::{estimate_rm_star, records, regularize, HullForm, IncompletePair, RmStarEstimate, RmStarMethod};
use crate::num::{ext_real, ln_f64, Coefficient, Complex, GaussRational};
use crate::poly::Poly;
use crate::series::{poly_combo, DegreeBounds, PowerSeries, SeriesSystem};
use crate::trajectory::{analyze, Cutoffs, Window};

use super::{classify_zeros, limit_zeros, suetin_scalar, SingularityClassification, SuetinReport};

/// Estimate of R_k(F), the radius of the largest disk where F has at most k poles.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub order: usize,
    #[serde(with = "ext_real")]
    pub value: f64,
    pub window: Window,
}

/// R_0 from Taylor coefficients (k = 0) or R*_k of the Padé row k, both by
/// fitting ln|c_n| = a + b n + c ln n over the trailing half of `range`.
pub fn radius_estimate(
    f: &PowerSeries,
    k: usize,
    range: std::ops::RangeInclusive<usize>,
    prec: u32,
) -> Result<RadiusEstimate> {
    let window = Window::trailing_half(*range.start(), *range.end());
    if k == 0 {
        let pts: Vec<(f64, f64)> = (window.start..=window.end)
            .map(|j| (j, f.coeff(j, prec)))
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as f64, ln_f64(&c.abs())))
            .collect();
        if pts.is_empty() {
            return Ok(RadiusEstimate {
                order: 0,
                value: f64::INFINITY,
                window,
            });
        }
        if pts.len() < 8 {
            return Err(Error::WindowTooShort { got: pts.len(), need: 8 });
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ws: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let [_, b, _] = fit_affine2(&xs, &ws, &ys);
        return Ok(RadiusEstimate {
            order: 0,
            value: (-b).exp(),
            window,
        });
    }
    let row = pade_row_pairs(f, k, range, prec)?;
    let recs: Vec<_> = records(&row, prec).into_iter().filter_map(|(_, r)| r.ok()).collect();
    let est = estimate_rm_star(&recs, None, RmStarMethod::LogLinearRegression)?;
    Ok(RadiusEstimate {
        order: k,
        value: est.value,
        window: est.window,
    })
}

fn pade_row(f: &PowerSeries, k: usize, range: std::ops::RangeInclusive<usize>, prec: u32) -> Result<Vec<HPApproximant>> {
    let system = SeriesSystem::scalar(f.clone(), k)?;
    let lo = (*range.start()).max(k);
    Ok(row_sequence(&system, lo..=*range.end(), Normalization::Monic, SolveMethod::Auto, prec)
        .into_iter()
        .filter_map(|(_, r)| r.ok())
        .collect())
}

fn pade_row_pairs(
    f: &PowerSeries,
    k: usize,
    range: std::ops::RangeInclusive<usize>,
    prec: u32,
) -> Result<BTreeMap<usize, IncompletePair>> {
    Ok(pade_row(f, k, range, prec)?
        .into_iter()
        .map(|a| {
            (
                a.n,
                IncompletePair {
                    n: a.n,
                    m: k,
                    m_star: k,
                    p: a.numerators[0].clone(),
                    q: a.q().clone(),
                },
            )
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComboHypotheses {
    /// Every limit zero is simple.
    pub simple_zeros: bool,
    /// Every unique row has deg q_n = |m|.
    pub full_degree: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountedZero {
    pub zero: Complex,
    pub multiplicity: usize,
    /// "verdict" or "row_cross_check".
    pub via: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComboReport {
    pub multipliers: Vec<Poly>,
    pub m_star: usize,
    /// R*_{|m|}(F) from the incomplete records of F.
    pub rm_star: RmStarEstimate,
    /// R_{m*-1}(F).
    pub r_inner: RadiusEstimate,
    pub classification: SingularityClassification,
    /// Scalar reading of F's own Padé row m*, used as a cross-check.
    pub row_check: Option<SuetinReport>,
    pub counted: Vec<CountedZero>,
    pub count: usize,
    pub pass: bool,
    pub hypotheses: ComboHypotheses,
    /// Records rejected by the difference identity.
    pub rejected_records: Vec<usize>,
}

/// Count zeros of the limit denominator in the closed disk of radius
/// R_{m*-1}(F) that read as singular points of F.
///
/// A zero counts when its verdict for F is a pole or boundary singularity,
/// or when it lies within the combined uncertainty (at least eps_lambda) of
/// a pole or boundary point read off F's own Padé row m*.
pub fn combo_singularity_count(
    system: &SeriesSystem,
    m_star: usize,
    multipliers: &[Poly],
    run: &[HPApproximant],
    cutoffs: Cutoffs,
    prec: u32,
) -> Result<ComboReport> {
    if m_star == 0 {
        return Err(Error::InadmissibleCombination("m* must be at least 1".into()));
    }
    let combo = poly_combo(system, multipliers, DegreeBounds::Slack(m_star))?;
    if combo.degenerate {
        return Err(Error::InadmissibleCombination("every multiplier is zero".into()));
    }
    let f = combo.series;
    let total = system.m().total();
    let analysis = analyze(run, prec, cutoffs)?;
    let mut notes = Vec::new();

    let zeros = limit_zeros(&analysis);
    let simple_zeros = zeros.iter().all(|(_, k)| *k == 1);
    if !simple_zeros {
        notes.push("limit denominator has a multiple zero".into());
    }
    let unique: Vec<&HPApproximant> = run.iter().filter(|a| a.denominator.is_unique()).collect();
    let full_degree = unique.iter().all(|a| a.q().degree() == Some(total));
    if !full_degree {
        notes.push(format!("some rows have deg q_n < {total}"));
    }

    let pairs: BTreeMap<usize, IncompletePair> = unique
        .iter()
        .map(|a| {
            let p = multipliers
                .iter()
                .zip(&a.numerators)
                .fold(Poly::zero(prec), |acc, (c, pk)| acc.add(&c.mul(pk)));
            (
                a.n,
                IncompletePair {
                    n: a.n,
                    m: total,
                    m_star,
                    p,
                    q: a.q().clone(),
                },
            )
        })
        .collect();
    let mut recs = Vec::new();
    let mut rejected_records = Vec::new();
    for (n, r) in records(&pairs, prec) {
        match r {
            Ok(r) => recs.push(r),
            Err(_) => rejected_records.push(n),
        }
    }
    let rm_star = estimate_rm_star(&recs, None, RmStarMethod::LogLinearRegression)?;
    let regularization = if rm_star.is_infinite() {
        None
    } else {
        let alpha = recs.iter().filter(|r| rm_star.window.contains(r.n)).map(|r| (r.n, r.a_abs())).collect();
        regularize(&alpha, rm_star.value, HullForm::Plain).ok()
    };
    let locations: Vec<Complex> = zeros.iter().map(|z| z.0.clone()).collect();
    let classification = classify_zeros(&locations, &recs, &rm_star, regularization.as_ref(), &analysis);

    let first = run.iter().map(|a| a.n).min().unwrap_or(0);
    let last = run.iter().map(|a| a.n).max().unwrap_or(0);
    let r_inner = radius_estimate(&f, m_star - 1, first..=last, prec)?;

    // F's own Padé row m*: its interior poles and boundary points.
    let row_run = pade_row(&f, m_star, first..=last, prec)?;
    let row_analysis = analyze(&row_run, prec, cutoffs)?;
    let row_pairs: BTreeMap<usize, IncompletePair> = row_run
        .iter()
        .map(|a| {
            (
                a.n,
                IncompletePair {
                    n: a.n,
                    m: m_star,
                    m_star,
                    p: a.numerators[0].clone(),
                    q: a.q().clone(),
                },
            )
        })
        .collect();
    let row_recs: Vec<_> = records(&row_pairs, prec).into_iter().filter_map(|(_, r)| r.ok()).collect();
    let row_check = estimate_rm_star(&row_recs, None, RmStarMethod::LogLinearRegression)
        .ok()
        .and_then(|est| {
            let zs: Vec<Complex> = row_analysis.limits.iter().map(|l| l.location.clone()).collect();
            suetin_scalar(&zs, &est).ok()
        });
    let certified: Vec<(Complex, f64)> = match &row_check {
        Some(s) => s
            .poles
            .iter()
            .chain(&s.boundary)
            .map(|z| {
                let rho = row_analysis
                    .limits
                    .iter()
                    .find(|l| l.location == *z)
                    .map_or(0.0, |l| l.radius);
                (z.clone(), rho)
            })
            .collect(),
        None => Vec::new(),
    };

    let reach = if r_inner.value.is_infinite() { f64::INFINITY } else { 1.05 * r_inner.value };
    let mut counted = Vec::new();
    for (lp, v) in analysis.limits.iter().zip(&classification.verdicts) {
        if v.modulus > reach {
            continue;
        }
        let via = if v.verdict.is_singular() {
            Some("verdict")
        } else if certified
            .iter()
            .any(|(c, rho)| c.dist(&lp.location).to_f64() <= cutoffs.eps_lambda.max(rho + lp.radius))
        {
            Some("row_cross_check")
        } else {
            None
        };
        if let Some(via) = via {
            counted.push(CountedZero {
                zero: lp.location.clone(),
                multiplicity: lp.multiplicity(),
                via: via.into(),
            });
        }
    }
    let count = counted.len();
    Ok(ComboReport {
        multipliers: multipliers.to_vec(),
        m_star,
        rm_star,
        r_inner,
        classification,
        row_check,
        counted,
        count,
        pass: count >= m_star,
        hypotheses: ComboHypotheses {
            simple_zeros,
            full_degree,
            notes,
        },
        rejected_records,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeCandidate {
    /// Integer coefficients of each multiplier, lowest degree first.
    pub multipliers: Vec<Vec<i8>>,
    #[serde(with = "ext_real")]
    pub radius: f64,
    /// |radius - |zeta||.
    #[serde(with = "ext_real")]
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeSearch {
    pub zeta: Complex,
    pub m_star: usize,
    /// Best candidates first.
    pub best: Vec<LatticeCandidate>,
    pub explored: usize,
    /// The whole {-1, 0, 1} lattice was visited.
    pub exhaustive: bool,
}

/// Search multipliers with coefficients in {-1, 0, 1} and deg p_k <= m_k - m*
/// for a combination whose R_{m*-1} matches |zeta|. Combinations equal up to
/// an overall sign are visited once. Not a proof of absence when none match.
pub fn lattice_search(
    system: &SeriesSystem,
    zeta: &Complex,
    m_star: usize,
    range: std::ops::RangeInclusive<usize>,
    max_combos: usize,
    keep: usize,
    prec: u32,
) -> Result<LatticeSearch> {
    let degs: Vec<Option<usize>> = system
        .m()
        .entries()
        .iter()
        .map(|&mk| (mk >= m_star).then(|| mk - m_star))
        .collect();
    let slots: usize = degs.iter().map(|d| d.map_or(0, |d| d + 1)).sum();
    let total = 3usize.saturating_pow(slots as u32);
    let target = zeta.abs().to_f64();
    let mut out = Vec::new();
    let mut explored = 0;
    for code in 1..total {
        let digits: Vec<i8> = (0..slots).map(|i| ((code / 3usize.pow(i as u32)) % 3) as i8 - 1).collect();
        if digits.iter().find(|d| **d != 0) != Some(&1) {
            continue;
        }
        if explored >= max_combos {
            break;
        }
        explored += 1;
        let mut it = digits.iter();
        let mults: Vec<Vec<i8>> = degs
            .iter()
            .map(|d| match d {
                Some(d) => (0..=*d).map(|_| *it.next().unwrap()).collect(),
                None => Vec::new(),
            })
            .collect();
        let polys: Vec<Poly> = mults
            .iter()
            .map(|c| {
                Poly::new(
                    c.iter()
                        .map(|v| Coefficient::from_exact(GaussRational::from_int(i64::from(*v)), prec))
                        .collect(),
                )
            })
            .collect();
        let Ok(combo) = poly_combo(system, &polys, DegreeBounds::Slack(m_star)) else { continue };
        if combo.degenerate {
            continue;
        }
        if let Ok(r) = radius_estimate(&combo.series, m_star - 1, range.clone(), prec) {
            out.push(LatticeCandidate {
                multipliers: mults,
                radius: r.value,
                gap: (r.value - target).abs(),
            });
        }
    }
    let exhaustive = explored == (total - 1) / 2;
    out.sort_by(|a, b| a.gap.total_cmp(&b.gap));
    out.truncate(keep);
    Ok(LatticeSearch {
        zeta: zeta.clone(),
        m_star,
        best: out,
        explored,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_series;

    #[test]
    fn taylor_radius() {
        let f = parse_series("1/(z-2)").unwrap();
        let r = radius_estimate(&f, 0, 10..=60, 128).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
        let p = parse_series("1 + z").unwrap();
        assert!(radius_estimate(&p, 0, 10..=60, 128).unwrap().value.is_infinite());
    }

    #[test]
    fn pade_row_radius() {
        let f = parse_series("1/(z-1) + 1/(z-3)").unwrap();
        let r = radius_estimate(&f, 1, 10..=50, 256).unwrap();
        assert!((r.value - 3.0).abs() < 0.15, "{}", r.value);
    }
}
