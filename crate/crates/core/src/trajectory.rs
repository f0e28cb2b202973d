//! Zero trajectories of the denominators across n, convergence rates, the
//! attraction counts lambda-hat / mu-hat, and the denominator rate theta-hat.
//!
//! Every quantity here is a finite-n estimate. Cutoffs and windows are
//! carried in the outputs so reports can state what was measured.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::linfit;
use crate::hp::{normalize, HPApproximant, Normalization};
use crate::num::{ln_f64, Complex};
use crate::poly::Poly;
use crate::roots::{order_by_distance, roots, RootOptions, RootSet};

/// Numeric cutoffs for lambda-hat and mu-hat.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    /// Absolute distance at the window end below which a zero counts as attracted.
    pub eps_lambda: f64,
    /// Margin below 1 on the n-th-root scale for geometric attraction.
    pub eps_mu: f64,
    /// Fewest points accepted by a rate fit.
    pub min_points: usize,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            eps_lambda: 1e-2,
            eps_mu: 0.05,
            min_points: 8,
        }
    }
}

/// Inclusive n-range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn contains(&self, n: usize) -> bool {
        (self.start..=self.end).contains(&n)
    }

    /// The last half of the sweep [first, last].
    pub fn trailing_half(first: usize, last: usize) -> Self {
        Self {
            start: last - (last - first) / 2,
            end: last,
        }
    }
}

/// Distances below `2^(-3P/8) * max(1, scale)` are read as zero: the root
/// finder resolves double zeros only to about that accuracy.
pub fn snap_to_floor(d: Float, scale: &Float) -> Float {
    let prec = d.prec();
    let s = if *scale > 1u32 { scale.clone() } else { Float::with_val(prec, 1u32) };
    if d <= Float::with_val(prec, s * crate::num::pow2(prec, -(3 * prec as i32) / 8)) {
        Float::new(prec)
    } else {
        d
    }
}

/// Zeros per n of a row sequence.
#[derive(Clone, Debug, Default)]
pub struct Collected {
    pub roots: BTreeMap<usize, RootSet>,
    /// Rows whose kernel dimension exceeds 1; excluded from matching.
    pub non_unique: Vec<usize>,
    /// Rows whose zeros could not be computed, with the reason.
    pub failures: BTreeMap<usize, String>,
}

impl Collected {
    /// Zeros per n with every cluster replaced by its centre, repeated by
    /// multiplicity. The mean of a k-fold cluster is far more accurate than
    /// its members, which scatter like 2^(-P/k).
    pub fn root_map(&self) -> BTreeMap<usize, Vec<Complex>> {
        self.roots
            .iter()
            .map(|(n, r)| {
                let zs = r
                    .clusters
                    .iter()
                    .flat_map(|c| std::iter::repeat_n(c.center.clone(), c.multiplicity))
                    .collect();
                (*n, zs)
            })
            .collect()
    }
}

/// Zeros of every denominator. Root-finder failures are recorded per n.
pub fn collect(run: &[HPApproximant], prec: u32) -> Collected {
    let results: Vec<(usize, bool, Result<RootSet>)> = run
        .par_iter()
        .map(|a| {
            let unique = a.denominator.is_unique();
            (a.n, unique, roots(a.q(), prec, RootOptions::default()))
        })
        .collect();
    let mut out = Collected::default();
    for (n, unique, r) in results {
        if !unique {
            out.non_unique.push(n);
            continue;
        }
        match r {
            Ok(rs) => {
                out.roots.insert(n, rs);
            }
            Err(e) => {
                out.failures.insert(n, e.to_string());
            }
        }
    }
    out
}

/// Minimum-total-distance assignment between two zero sets, as (prev, next)
/// index pairs covering the smaller set. Exact for sets up to 16; greedy by
/// increasing distance above that.
pub fn match_roots(prev: &[Complex], next: &[Complex]) -> Vec<(usize, usize)> {
    let swap = prev.len() > next.len();
    let (a, b) = if swap { (next, prev) } else { (prev, next) };
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| x.dist(y).to_f64()).collect()).collect();
    let pairs = if b.len() <= 16 {
        assign_dp(&cost, b.len())
    } else {
        assign_greedy(&cost)
    };
    let mut out: Vec<(usize, usize)> = pairs
        .into_iter()
        .map(|(i, j)| if swap { (j, i) } else { (i, j) })
        .collect();
    out.sort_unstable();
    out
}

fn assign_dp(cost: &[Vec<f64>], nb: usize) -> Vec<(usize, usize)> {
    let na = cost.len();
    let full = 1usize << nb;
    // best[i][mask]: minimal cost assigning rows i.. given used columns `mask`.
    let mut best = vec![vec![f64::INFINITY; full]; na + 1];
    for v in best[na].iter_mut() {
        *v = 0.0;
    }
    for i in (0..na).rev() {
        for mask in 0..full {
            if (mask as u32).count_ones() as usize != i {
                continue;
            }
            let mut b = f64::INFINITY;
            for (j, c) in cost[i].iter().enumerate() {
                if mask & (1 << j) == 0 {
                    let v = c + best[i + 1][mask | (1 << j)];
                    if v < b {
                        b = v;
                    }
                }
            }
            best[i][mask] = b;
        }
    }
    let mut mask = 0usize;
    let mut out = Vec::with_capacity(na);
    for (i, row) in cost.iter().enumerate() {
        let target = best[i][mask];
        let j = (0..nb)
            .filter(|j| mask & (1 << j) == 0)
            .min_by(|&x, &y| {
                let vx = row[x] + best[i + 1][mask | (1 << x)];
                let vy = row[y] + best[i + 1][mask | (1 << y)];
                (vx - target).abs().total_cmp(&(vy - target).abs())
            })
            .expect("enough columns");
        out.push((i, j));
        mask |= 1 << j;
    }
    out
}

fn assign_greedy(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let mut all: Vec<(f64, usize, usize)> = cost
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, c)| (*c, i, j)))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_a = vec![false; cost.len()];
    let mut used_b = vec![false; cost.first().map_or(0, Vec::len)];
    let mut out = Vec::new();
    for (_, i, j) in all {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// One matched zero per n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroTrajectory {
    pub id: usize,
    pub path: BTreeMap<usize, Complex>,
    /// Last n before the trajectory stopped being matched, when it ended.
    pub ended_at: Option<usize>,
}

impl ZeroTrajectory {
    pub fn distances(&self, target: &Complex) -> BTreeMap<usize, Float> {
        self.path.iter().map(|(n, z)| (*n, z.dist(target))).collect()
    }

    pub fn last(&self) -> Option<(usize, &Complex)> {
        self.path.iter().next_back().map(|(n, z)| (*n, z))
    }
}

/// Link zeros across consecutive n by optimal assignment. A trajectory missed
/// at one n pauses; missed at two consecutive n it ends.
pub fn build_trajectories(roots_by_n: &BTreeMap<usize, Vec<Complex>>) -> Vec<ZeroTrajectory> {
    let mut trajs: Vec<ZeroTrajectory> = Vec::new();
    let mut misses: Vec<usize> = Vec::new();
    for (&n, zs) in roots_by_n {
        let alive: Vec<usize> = (0..trajs.len()).filter(|&t| trajs[t].ended_at.is_none()).collect();
        let prev: Vec<Complex> = alive.iter().map(|&t| trajs[t].last().unwrap().1.clone()).collect();
        let pairs = match_roots(&prev, zs);
        let mut matched_next = vec![false; zs.len()];
        let mut matched_alive = vec![false; alive.len()];
        for (i, j) in pairs {
            trajs[alive[i]].path.insert(n, zs[j].clone());
            misses[alive[i]] = 0;
            matched_next[j] = true;
            matched_alive[i] = true;
        }
        for (i, &t) in alive.iter().enumerate() {
            if !matched_alive[i] {
                misses[t] += 1;
                if misses[t] >= 2 {
                    trajs[t].ended_at = trajs[t].last().map(|(n, _)| n);
                }
            }
        }
        for (j, z) in zs.iter().enumerate() {
            if !matched_next[j] {
                let id = trajs.len();
                trajs.push(ZeroTrajectory {
                    id,
                    path: BTreeMap::from([(n, z.clone())]),
                    ended_at: None,
                });
                misses.push(0);
            }
        }
    }
    trajs
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RateClass {
    Geometric { theta: f64 },
    Polynomial { p: f64 },
    Stagnant,
    Divergent,
    /// Every distance is exactly zero.
    Exact,
}

impl RateClass {
    pub fn is_geometric_or_exact(&self) -> bool {
        matches!(self, RateClass::Geometric { .. } | RateClass::Exact)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub class: RateClass,
    /// R^2 of the winning regression.
    pub fit_quality: f64,
    pub window: Window,
}

/// Classify the decay of a distance sequence over the supplied n-range.
///
/// Fits ln d against n (geometric, theta = e^slope) and against ln n
/// (polynomial, p = -slope); the larger R^2 wins. Less than 10% total decay
/// along the geometric fit is stagnant, a positive trend divergent.
pub fn estimate_rate(distances: &BTreeMap<usize, Float>) -> Result<RateEstimate> {
    estimate_rate_min(distances, 8)
}

pub fn estimate_rate_min(distances: &BTreeMap<usize, Float>, min_points: usize) -> Result<RateEstimate> {
    if distances.len() < min_points {
        return Err(Error::WindowTooShort {
            got: distances.len(),
            need: min_points,
        });
    }
    let window = Window {
        start: *distances.keys().next().unwrap(),
        end: *distances.keys().next_back().unwrap(),
    };
    let exact = RateEstimate {
        class: RateClass::Exact,
        fit_quality: 1.0,
        window,
    };
    if distances.values().all(|d| d.is_zero()) || distances.values().next_back().unwrap().is_zero() {
        return Ok(exact);
    }
    let pts: Vec<(f64, f64)> = distances
        .iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(n, d)| (*n as f64, ln_f64(d)))
        .collect();
    if pts.len() < min_points {
        return Err(Error::WindowTooShort {
            got: pts.len(),
            need: min_points,
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ls: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let geo = linfit(&xs, &ys);
    let pol = linfit(&ls, &ys);
    let span = xs.last().unwrap() - xs[0];
    let class = if geo.slope > 0.0 {
        RateClass::Divergent
    } else if (geo.slope * span).exp() > 0.9 {
        RateClass::Stagnant
    } else if geo.r2 >= pol.r2 {
        RateClass::Geometric { theta: geo.slope.exp() }
    } else {
        RateClass::Polynomial { p: -pol.slope }
    };
    let fit_quality = match class {
        RateClass::Polynomial { .. } => pol.r2,
        _ => geo.r2,
    };
    Ok(RateEstimate {
        class,
        fit_quality,
        window,
    })
}

/// Evidence for one index nu of the ordered distances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NuEvidence {
    pub nu: usize,
    /// |zeta - zeta_{n,nu}| at the window end.
    pub last_distance: f64,
    /// max over the window of |zeta - zeta_{n,nu}|^(1/n).
    pub max_root: f64,
    pub rate: Option<RateEstimate>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaMu {
    pub lambda_hat: usize,
    pub mu_hat: usize,
    pub thresholds: Cutoffs,
    pub window: Window,
    pub evidence: Vec<NuEvidence>,
}

/// Ordered distance sequences d_nu(n) = |zeta - zeta_{n,nu}|, nu = 1..=max l_n,
/// with the convention d_nu(n) = 1 when nu > l_n.
pub fn ordered_distances(
    roots_by_n: &BTreeMap<usize, Vec<Complex>>,
    zeta: &Complex,
    window: Window,
) -> Vec<BTreeMap<usize, Float>> {
    let in_window: Vec<(&usize, &Vec<Complex>)> = roots_by_n.iter().filter(|(n, _)| window.contains(**n)).collect();
    let max_nu = in_window.iter().map(|(_, z)| z.len()).max().unwrap_or(0);
    let prec = zeta.prec();
    let scale = zeta.abs();
    let mut out = vec![BTreeMap::new(); max_nu];
    for (n, zs) in in_window {
        let ordered = order_by_distance(zs, zeta);
        for (nu, slot) in out.iter_mut().enumerate() {
            let d = ordered
                .get(nu)
                .map(|o| snap_to_floor(o.distance.clone(), &scale))
                .unwrap_or_else(|| Float::with_val(prec, 1u32));
            slot.insert(*n, d);
        }
    }
    out
}

/// Estimate lambda(zeta) and mu(zeta) over `window`.
pub fn lambda_mu(
    roots_by_n: &BTreeMap<usize, Vec<Complex>>,
    zeta: &Complex,
    window: Window,
    cutoffs: &Cutoffs,
) -> LambdaMu {
    let seqs = ordered_distances(roots_by_n, zeta, window);
    let mut evidence = Vec::new();
    let mut lambda_hat = 0;
    let mut mu_hat = 0;
    let mut mu_open = true;
    for (i, d) in seqs.iter().enumerate() {
        let nu = i + 1;
        let last = d.values().next_back().map_or(1.0, Float::to_f64);
        let max_root = d
            .iter()
            .map(|(n, x)| if x.is_zero() { 0.0 } else { (ln_f64(x) / *n as f64).exp() })
            .fold(0.0f64, f64::max);
        let rate = estimate_rate_min(d, cutoffs.min_points).ok();
        if last < cutoffs.eps_lambda {
            lambda_hat = nu;
        }
        let geometric = max_root < 1.0 - cutoffs.eps_mu && rate.is_none_or(|r| r.class.is_geometric_or_exact());
        if mu_open && geometric {
            mu_hat = nu;
        } else {
            mu_open = false;
        }
        evidence.push(NuEvidence {
            nu,
            last_distance: last,
            max_root,
            rate,
        });
    }
    LambdaMu {
        lambda_hat,
        mu_hat: mu_hat.min(lambda_hat),
        thresholds: *cutoffs,
        window,
        evidence,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta: f64,
    pub window: Window,
    /// Number of nonzero errors used by the regression.
    pub points: usize,
}

fn theta_from_errors(errors: &BTreeMap<usize, Float>, window: Window) -> ThetaEstimate {
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(n, e)| (*n as f64, ln_f64(e)))
        .collect();
    let trailing_zero = errors.values().next_back().is_some_and(|e| e.is_zero());
    if pts.len() < 3 || trailing_zero {
        return ThetaEstimate {
            theta: 0.0,
            window,
            points: pts.len(),
        };
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    ThetaEstimate {
        theta: linfit(&xs, &ys).slope.exp(),
        window,
        points: pts.len(),
    }
}

/// theta-hat from ||q_n - q_limit|| (coefficient 1-norm, monic q_n) by a
/// log-linear fit over the window; 0 when the error vanishes exactly.
pub fn estimate_theta(run: &[HPApproximant], q_limit: &Poly, window: Window, prec: u32) -> ThetaEstimate {
    let errors: BTreeMap<usize, Float> = run
        .iter()
        .filter(|a| window.contains(a.n) && a.denominator.is_unique())
        .map(|a| (a.n, snap_to_floor(normalize(a.q(), Normalization::Monic, prec).dist(q_limit), &q_limit.norm_inf())))
        .collect();
    theta_from_errors(&errors, window)
}

/// theta-hat from consecutive differences ||q_{n+1} - q_n||, which needs no limit.
pub fn estimate_theta_cauchy(run: &[HPApproximant], window: Window, prec: u32) -> ThetaEstimate {
    let monic: BTreeMap<usize, Poly> = run
        .iter()
        .filter(|a| window.contains(a.n) && a.denominator.is_unique())
        .map(|a| (a.n, normalize(a.q(), Normalization::Monic, prec)))
        .collect();
    let errors: BTreeMap<usize, Float> = monic
        .iter()
        .zip(monic.iter().skip(1))
        .filter(|((n, _), (m, _))| **m == **n + 1)
        .map(|((n, a), (_, b))| (*n, snap_to_floor(b.dist(a), &b.norm_inf())))
        .collect();
    theta_from_errors(&errors, window)
}

/// Extrapolated limit of one or more trajectories.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitPoint {
    pub location: Complex,
    /// Uncertainty radius of the location.
    pub radius: f64,
    pub members: Vec<usize>,
    pub rates: Vec<RateClass>,
}

impl LimitPoint {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// A trajectory whose increments do not sum to a finite tail.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonConvergent {
    pub id: usize,
    pub last: Complex,
    pub rate: Option<RateClass>,
}

fn extrapolate(t: &ZeroTrajectory, window: Window, min_points: usize) -> std::result::Result<(Complex, f64, RateClass), Option<RateClass>> {
    let pts: Vec<(usize, &Complex)> = t.path.iter().filter(|(n, _)| window.contains(**n)).map(|(n, z)| (*n, z)).collect();
    if pts.len() < min_points + 1 {
        return Err(None);
    }
    let incr: BTreeMap<usize, Float> = pts
        .windows(2)
        .map(|w| (w[0].0, snap_to_floor(w[1].1.dist(w[0].1), &w[1].1.abs())))
        .collect();
    let rate = estimate_rate_min(&incr, min_points).map_err(|_| None)?;
    let (n_last, z_last) = *pts.last().unwrap();
    let z_prev = pts[pts.len() - 2].1;
    let delta = z_last - z_prev;
    let factor = match rate.class {
        RateClass::Exact => return Ok((z_last.clone(), 0.0, rate.class)),
        RateClass::Geometric { theta } => theta / (1.0 - theta),
        RateClass::Polynomial { p } if p > 1.0 => n_last as f64 / (p - 1.0),
        other => return Err(Some(other)),
    };
    let step = delta.scale(&Float::with_val(z_last.prec(), factor));
    Ok((z_last + &step, step.abs().to_f64(), rate.class))
}

/// Limits of the trajectories alive at the end of `window`. Limits whose
/// uncertainty disks overlap are merged at the member with the smallest radius.
pub fn limit_points(
    trajectories: &[ZeroTrajectory],
    window: Window,
    cutoffs: &Cutoffs,
) -> (Vec<LimitPoint>, Vec<NonConvergent>) {
    let mut singles = Vec::new();
    let mut nonconv = Vec::new();
    for t in trajectories {
        let Some((n_last, z_last)) = t.last() else { continue };
        if n_last != window.end {
            continue;
        }
        match extrapolate(t, window, cutoffs.min_points) {
            Ok((loc, rad, class)) => singles.push((t.id, loc, rad, class)),
            Err(rate) => nonconv.push(NonConvergent {
                id: t.id,
                last: z_last.clone(),
                rate,
            }),
        }
    }
    let k = singles.len();
    let mut group: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in i + 1..k {
            let d = singles[i].1.dist(&singles[j].1).to_f64();
            if d <= singles[i].2 + singles[j].2 {
                let (gi, gj) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == gj {
                        *g = gi;
                    }
                }
            }
        }
    }
    let mut out: Vec<LimitPoint> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..k {
        let g = group[i];
        if seen.contains(&g) {
            continue;
        }
        seen.push(g);
        let idx: Vec<usize> = (0..k).filter(|&j| group[j] == g).collect();
        let best = *idx
            .iter()
            .min_by(|&&a, &&b| singles[a].2.total_cmp(&singles[b].2))
            .unwrap();
        out.push(LimitPoint {
            location: singles[best].1.clone(),
            radius: singles[best].2,
            members: idx.iter().map(|&j| singles[j].0).collect(),
            rates: idx.iter().map(|&j| singles[j].3).collect(),
        });
    }
    (out, nonconv)
}

/// Monic polynomial with the limit points as zeros, counted with multiplicity.
pub fn limit_polynomial(limits: &[LimitPoint], prec: u32) -> Poly {
    let zs: Vec<Complex> = limits
        .iter()
        .flat_map(|l| std::iter::repeat_n(l.location.clone(), l.multiplicity()))
        .collect();
    Poly::from_roots(&zs, prec)
}

/// Everything the detectors need from a row sequence's zeros.
#[derive(Clone, Debug)]
pub struct TrajectoryAnalysis {
    pub collected: Collected,
    pub roots_by_n: BTreeMap<usize, Vec<Complex>>,
    pub trajectories: Vec<ZeroTrajectory>,
    pub window: Window,
    pub limits: Vec<LimitPoint>,
    pub nonconvergent: Vec<NonConvergent>,
    pub cutoffs: Cutoffs,
}

impl TrajectoryAnalysis {
    pub fn lambda_mu(&self, zeta: &Complex) -> LambdaMu {
        lambda_mu(&self.roots_by_n, zeta, self.window, &self.cutoffs)
    }

    pub fn q_limit(&self, prec: u32) -> Poly {
        limit_polynomial(&self.limits, prec)
    }
}

/// Zeros, trajectories and limits of a row sequence over its trailing half.
pub fn analyze(run: &[HPApproximant], prec: u32, cutoffs: Cutoffs) -> Result<TrajectoryAnalysis> {
    let collected = collect(run, prec);
    let roots_by_n = collected.root_map();
    let (first, last) = match (roots_by_n.keys().next(), roots_by_n.keys().next_back()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::WindowTooShort { got: 0, need: cutoffs.min_points }),
    };
    let window = Window::trailing_half(first, last);
    analyze_window(collected, window, cutoffs)
}

pub fn analyze_window(collected: Collected, window: Window, cutoffs: Cutoffs) -> Result<TrajectoryAnalysis> {
    let roots_by_n = collected.root_map();
    let trajectories = build_trajectories(&roots_by_n);
    let (limits, nonconvergent) = limit_points(&trajectories, window, &cutoffs);
    Ok(TrajectoryAnalysis {
        collected,
        roots_by_n,
        trajectories,
        window,
        limits,
        nonconvergent,
        cutoffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn c(re: f64, im: f64) -> Complex {
        Complex::from_f64(P, re, im)
    }

    fn seq(f: impl Fn(usize) -> f64, range: std::ops::RangeInclusive<usize>) -> BTreeMap<usize, Float> {
        range.map(|n| (n, Float::with_val(P, f(n)))).collect()
    }

    #[test]
    fn matching_examples() {
        let pairs = match_roots(&[c(1.01, 0.0), c(2.9, 0.0)], &[c(3.2, 0.0), c(1.001, 0.0)]);
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        let same = [c(1.0, 1.0), c(-2.0, 0.5), c(0.0, -3.0)];
        assert_eq!(match_roots(&same, &same), vec![(0, 0), (1, 1), (2, 2)]);
        let drop = match_roots(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.1, 0.0)]);
        assert_eq!(drop, vec![(1, 0)]);
    }

    #[test]
    fn trajectory_ends_after_two_misses() {
        let mut m = BTreeMap::new();
        for n in 1..=3 {
            m.insert(n, vec![c(1.0, 0.0), c(5.0, 0.0)]);
        }
        for n in 4..=6 {
            m.insert(n, vec![c(1.0, 0.0)]);
        }
        let t = build_trajectories(&m);
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].ended_at, Some(3));
        assert_eq!(t[0].path.len(), 6);
    }

    #[test]
    fn rate_examples() {
        let g = estimate_rate(&seq(|n| 0.5f64.powi(n as i32), 10..=40)).unwrap();
        match g.class {
            RateClass::Geometric { theta } => assert!((theta - 0.5).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let p = estimate_rate(&seq(|n| 1.0 / n as f64, 10..=40)).unwrap();
        match p.class {
            RateClass::Polynomial { p } => assert!((p - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let s = estimate_rate(&seq(|_| 0.3, 10..=40)).unwrap();
        assert_eq!(s.class, RateClass::Stagnant);
        let d = estimate_rate(&seq(|n| n as f64, 10..=40)).unwrap();
        assert_eq!(d.class, RateClass::Divergent);
        assert!(matches!(
            estimate_rate(&seq(|n| n as f64, 1..=5)),
            Err(Error::WindowTooShort { got: 5, need: 8 })
        ));
        let e = estimate_rate(&seq(|_| 0.0, 1..=10)).unwrap();
        assert_eq!(e.class, RateClass::Exact);
    }

    #[test]
    fn lambda_mu_synthetic_profile() {
        let m: BTreeMap<usize, Vec<Complex>> = (20..=200)
            .map(|n| {
                let fast = &c(1.0, 0.0) + &Complex::from_real(crate::num::pow2(P, -(n as i32)));
                (n, vec![c(1.0 + 1.0 / n as f64, 0.0), fast])
            })
            .collect();
        let lm = lambda_mu(&m, &c(1.0, 0.0), Window::trailing_half(20, 200), &Cutoffs::default());
        assert_eq!((lm.lambda_hat, lm.mu_hat), (2, 1));
        let far = lambda_mu(&m, &c(-3.0, 0.0), Window::trailing_half(20, 200), &Cutoffs::default());
        assert_eq!((far.lambda_hat, far.mu_hat), (0, 0));
    }

    #[test]
    fn limits_merge_fast_and_slow_zero() {
        let m: BTreeMap<usize, Vec<Complex>> = (10..=60)
            .map(|n| {
                let fast = &c(1.0, 0.0) + &Complex::from_real(crate::num::pow2(P, -(n as i32) * 3));
                (n, vec![fast, c(1.0 + 2.0 / (n as f64 - 2.0), 0.0), c(3.0 + 0.5f64.powi(n as i32), 0.0)])
            })
            .collect();
        let traj = build_trajectories(&m);
        let (limits, nonconv) = limit_points(&traj, Window::trailing_half(10, 60), &Cutoffs::default());
        assert!(nonconv.is_empty());
        assert_eq!(limits.len(), 2);
        let one = limits.iter().find(|l| l.multiplicity() == 2).unwrap();
        assert!(one.location.dist(&c(1.0, 0.0)).to_f64() < 1e-12);
        let three = limits.iter().find(|l| l.multiplicity() == 1).unwrap();
        assert!(three.location.dist(&c(3.0, 0.0)).to_f64() < 1e-12);
    }
}
