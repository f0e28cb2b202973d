//! Classification of the limit zeros of a row sequence.
//!
//! All verdicts are finite-n readings under the cutoffs carried in each
//! report; none of them is a proof of the asymptotic statement it mirrors.

mod combo;
mod evidence;
mod suetin;

pub use combo::{
    combo_singularity_count, lattice_search, radius_estimate, ComboHypotheses, ComboReport, CountedZero, LatticeCandidate,
    LatticeSearch, RadiusEstimate,
};
pub use evidence::{c1_table, c2_table, c3_table, C1Row, C2Row, C3Row};
pub use suetin::{suetin_scalar, SuetinReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::HPApproximant;
use crate::incomplete::{IncompleteRecord, Regularization, RmStarEstimate};
use crate::num::{nth_root_f64, Complex};
use crate::poly::Poly;
use crate::trajectory::{estimate_theta, Cutoffs, LambdaMu, RateClass, ThetaEstimate, TrajectoryAnalysis, Window};

/// Relative modulus band around R*_m treated as the boundary circle.
pub const BOUNDARY_BAND: f64 = 0.05;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoleCandidate {
    pub location: Complex,
    /// Extrapolation uncertainty of `location`.
    pub radius: f64,
    pub tau_hat: usize,
    pub lambda_hat: usize,
    pub mu_hat: usize,
    /// Trajectories merged into this limit.
    pub members: usize,
    /// max over the window of |zeta - nearest zero|^(1/n).
    pub theta_contrib: f64,
    pub rates: Vec<RateClass>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemPoleReport {
    pub candidates: Vec<PoleCandidate>,
    pub q_limit: Poly,
    pub theta: ThetaEstimate,
    /// theta-hat < 1.
    pub converged: bool,
    pub max_theta_contrib: f64,
    /// Fraction of rows in the window with a one-dimensional kernel.
    pub unique_fraction: f64,
    pub sum_tau: usize,
    pub total_m: usize,
    /// sum tau-hat = |m|: every expected system pole was found.
    pub full_count: bool,
    pub window: Window,
    pub cutoffs: Cutoffs,
}

fn longest_unique_streak(run: &[HPApproximant]) -> usize {
    let mut ns: Vec<usize> = run.iter().filter(|a| a.denominator.is_unique()).map(|a| a.n).collect();
    ns.sort_unstable();
    let (mut best, mut cur) = (0, 0);
    for (i, n) in ns.iter().enumerate() {
        cur = if i > 0 && *n == ns[i - 1] + 1 { cur + 1 } else { 1 };
        best = best.max(cur);
    }
    best
}

/// Candidates for system poles and the denominator convergence rate.
pub fn detect_system_poles(run: &[HPApproximant], analysis: &TrajectoryAnalysis, prec: u32) -> Result<SystemPoleReport> {
    let window = analysis.window;
    let in_window: Vec<&HPApproximant> = run.iter().filter(|a| window.contains(a.n)).collect();
    let non_unique = in_window.iter().filter(|a| !a.denominator.is_unique()).count();
    if in_window.is_empty() || non_unique * 5 > in_window.len() {
        return Err(Error::UniquenessUnmet {
            non_unique,
            total: in_window.len(),
        });
    }
    let streak = longest_unique_streak(run);
    if streak < 16 {
        return Err(Error::WindowTooShort { got: streak, need: 16 });
    }
    let mut candidates = Vec::new();
    for lp in &analysis.limits {
        let lm = analysis.lambda_mu(&lp.location);
        if lm.mu_hat == 0 {
            continue;
        }
        let theta_contrib = analysis
            .roots_by_n
            .iter()
            .filter(|(n, _)| window.contains(**n))
            .filter_map(|(n, zs)| {
                zs.iter()
                    .map(|z| z.dist(&lp.location))
                    .min_by(|a, b| a.total_cmp(b))
                    .map(|d| nth_root_f64(&d, *n))
            })
            .fold(0.0f64, f64::max);
        candidates.push(PoleCandidate {
            location: lp.location.clone(),
            radius: lp.radius,
            tau_hat: lm.mu_hat.min(lp.multiplicity()),
            lambda_hat: lm.lambda_hat,
            mu_hat: lm.mu_hat,
            members: lp.multiplicity(),
            theta_contrib,
            rates: lp.rates.clone(),
        });
    }
    let q_limit = analysis.q_limit(prec);
    let theta = estimate_theta(run, &q_limit, window, prec);
    let sum_tau = candidates.iter().map(|c| c.tau_hat).sum();
    let total_m = run.first().map_or(0, |a| a.m.total());
    Ok(SystemPoleReport {
        max_theta_contrib: candidates.iter().map(|c| c.theta_contrib).fold(0.0, f64::max),
        converged: theta.theta < 1.0,
        candidates,
        q_limit,
        theta,
        unique_fraction: 1.0 - non_unique as f64 / in_window.len() as f64,
        sum_tau,
        total_m,
        full_count: sum_tau == total_m,
        window,
        cutoffs: analysis.cutoffs,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttractionCheck {
    pub zeta: Complex,
    pub tau: usize,
    pub lambda_mu: LambdaMu,
    pub pass: bool,
}

/// A known system pole of order tau should attract at least tau zeros geometrically.
pub fn verify_attraction(zeta: &Complex, tau: usize, analysis: &TrajectoryAnalysis) -> AttractionCheck {
    let lambda_mu = analysis.lambda_mu(zeta);
    AttractionCheck {
        zeta: zeta.clone(),
        tau,
        pass: lambda_mu.mu_hat >= tau,
        lambda_mu,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Interior,
    Boundary,
    Exterior,
}

impl Position {
    pub fn of(modulus: f64, rm_star: f64) -> Self {
        if rm_star.is_infinite() {
            return Position::Interior;
        }
        let rel = modulus / rm_star - 1.0;
        if rel.abs() <= BOUNDARY_BAND {
            Position::Boundary
        } else if rel < 0.0 {
            Position::Interior
        } else {
            Position::Exterior
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    AttractsQstar,
    PoleOfOrder { tau: usize },
    BoundarySingular,
    Undecided,
}

impl Verdict {
    pub fn is_singular(&self) -> bool {
        matches!(self, Verdict::PoleOfOrder { .. } | Verdict::BoundarySingular)
    }

    /// Whether the verdict is one the trichotomy allows at `pos`.
    pub fn allowed_at(&self, pos: Position) -> bool {
        match pos {
            Position::Interior => !matches!(self, Verdict::BoundarySingular),
            Position::Boundary => matches!(self, Verdict::AttractsQstar | Verdict::BoundarySingular | Verdict::Undecided),
            Position::Exterior => matches!(self, Verdict::AttractsQstar | Verdict::Undecided),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroVerdict {
    pub zero: Complex,
    pub modulus: f64,
    pub position: Position,
    pub verdict: Verdict,
    pub lambda_hat: usize,
    pub mu_hat: usize,
    /// Distance to the nearest q* zero at the last contact index, if any.
    pub qstar_distance: Option<f64>,
    pub qstar_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularityClassification {
    pub verdicts: Vec<ZeroVerdict>,
    pub rm_star: RmStarEstimate,
    /// Every A_n vanished: nothing to classify against.
    pub skipped_exact: bool,
    pub contact_indices: Vec<usize>,
    pub cutoffs: Cutoffs,
}

/// Nearest q* zero to zeta along the contact indices inside the analysis window.
fn qstar_attraction(
    zeta: &Complex,
    records: &[IncompleteRecord],
    contact: &[usize],
    window: Window,
) -> (Option<usize>, Option<f64>) {
    let last = records
        .iter()
        .filter(|r| window.contains(r.n) && contact.contains(&r.n))
        .max_by_key(|r| r.n);
    match last {
        Some(r) => (
            Some(r.n),
            r.qstar_zeros.iter().map(|z| z.dist(zeta).to_f64()).min_by(f64::total_cmp),
        ),
        None => (None, None),
    }
}

/// Per-zero verdicts from the trichotomy for incomplete rows.
///
/// Attraction by q* zeros is checked first at every position; interior zeros
/// are then poles when lambda-hat = mu-hat >= 1, boundary zeros are singular.
pub fn classify_zeros(
    zeros: &[Complex],
    records: &[IncompleteRecord],
    rm_star: &RmStarEstimate,
    regularization: Option<&Regularization>,
    analysis: &TrajectoryAnalysis,
) -> SingularityClassification {
    let contact: Vec<usize> = match regularization {
        Some(r) => r.contact_set.clone(),
        None => records.iter().map(|r| r.n).collect(),
    };
    if rm_star.is_infinite() {
        return SingularityClassification {
            verdicts: Vec::new(),
            rm_star: rm_star.clone(),
            skipped_exact: true,
            contact_indices: contact,
            cutoffs: analysis.cutoffs,
        };
    }
    let eps = analysis.cutoffs.eps_lambda;
    let verdicts = zeros
        .iter()
        .map(|z| {
            let modulus = z.abs().to_f64();
            let position = Position::of(modulus, rm_star.value);
            let lm = analysis.lambda_mu(z);
            let (qstar_index, qstar_distance) = qstar_attraction(z, records, &contact, analysis.window);
            let attracts = qstar_distance.is_some_and(|d| d < eps);
            let verdict = if attracts {
                Verdict::AttractsQstar
            } else {
                match position {
                    Position::Interior if lm.lambda_hat == lm.mu_hat && lm.mu_hat >= 1 => {
                        Verdict::PoleOfOrder { tau: lm.mu_hat }
                    }
                    Position::Boundary => Verdict::BoundarySingular,
                    _ => Verdict::Undecided,
                }
            };
            ZeroVerdict {
                zero: z.clone(),
                modulus,
                position,
                verdict,
                lambda_hat: lm.lambda_hat,
                mu_hat: lm.mu_hat,
                qstar_distance,
                qstar_index,
            }
        })
        .collect();
    SingularityClassification {
        verdicts,
        rm_star: rm_star.clone(),
        skipped_exact: false,
        contact_indices: contact,
        cutoffs: analysis.cutoffs,
    }
}

/// Distinct limit locations with multiplicities.
pub fn limit_zeros(analysis: &TrajectoryAnalysis) -> Vec<(Complex, usize)> {
    analysis
        .limits
        .iter()
        .map(|l| (l.location.clone(), l.multiplicity()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_bands() {
        assert_eq!(Position::of(1.0, 2.0), Position::Interior);
        assert_eq!(Position::of(2.05, 2.0), Position::Boundary);
        assert_eq!(Position::of(3.0, 2.0), Position::Exterior);
        assert_eq!(Position::of(3.0, f64::INFINITY), Position::Interior);
    }

    #[test]
    fn verdict_soundness_table() {
        use Position::*;
        assert!(!Verdict::BoundarySingular.allowed_at(Interior));
        assert!(!Verdict::PoleOfOrder { tau: 1 }.allowed_at(Exterior));
        assert!(!Verdict::PoleOfOrder { tau: 1 }.allowed_at(Boundary));
        assert!(Verdict::AttractsQstar.allowed_at(Exterior));
    }
}
