//! Evidence tables for the open converse statements. Rows tabulate what the
//! run shows; they never settle the statements.

use serde::{Deserialize, Serialize};

use crate::incomplete::IncompleteRecord;
use crate::num::Complex;
use crate::trajectory::{RateClass, TrajectoryAnalysis};

use super::{LatticeSearch, SingularityClassification, Verdict};

/// Geometric attraction at a limit point (candidate system pole of order mu-hat).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Row {
    pub zeta: Complex,
    pub lambda_hat: usize,
    pub mu_hat: usize,
    pub members: usize,
    pub rates: Vec<RateClass>,
}

pub fn c1_table(analysis: &TrajectoryAnalysis) -> Vec<C1Row> {
    analysis
        .limits
        .iter()
        .map(|l| {
            let lm = analysis.lambda_mu(&l.location);
            C1Row {
                zeta: l.location.clone(),
                lambda_hat: lm.lambda_hat,
                mu_hat: lm.mu_hat,
                members: l.multiplicity(),
                rates: l.rates.clone(),
            }
        })
        .filter(|r| r.mu_hat >= 1)
        .collect()
}

/// Attraction without rate, paired with the best lattice combination found.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C2Row {
    pub zeta: Complex,
    pub lambda_hat: usize,
    pub best_radius: Option<f64>,
    /// Some searched combination has its singular circle within 5% of |zeta|.
    pub singular_combination_found: bool,
}

pub fn c2_table(analysis: &TrajectoryAnalysis, searches: &[LatticeSearch]) -> Vec<C2Row> {
    analysis
        .limits
        .iter()
        .filter_map(|l| {
            let lm = analysis.lambda_mu(&l.location);
            if lm.lambda_hat == 0 {
                return None;
            }
            let modulus = l.location.abs().to_f64();
            let best = searches
                .iter()
                .filter(|s| s.zeta.dist(&l.location).to_f64() <= analysis.cutoffs.eps_lambda)
                .flat_map(|s| s.best.first())
                .min_by(|a, b| a.gap.total_cmp(&b.gap));
            Some(C2Row {
                zeta: l.location.clone(),
                lambda_hat: lm.lambda_hat,
                best_radius: best.map(|b| b.radius),
                singular_combination_found: best.is_some_and(|b| b.gap <= 0.05 * modulus),
            })
        })
        .collect()
}

/// Multiplicity of a limit zero as a zero of q* against what the converse predicts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C3Row {
    pub zeta: Complex,
    pub tau: usize,
    /// Pole order read from the verdict, if any.
    pub tau_pole: usize,
    /// q* zeros within eps_lambda of zeta at the last contact index.
    pub qstar_multiplicity: usize,
    pub required: usize,
    pub satisfied: bool,
}

pub fn c3_table(
    analysis: &TrajectoryAnalysis,
    classification: &SingularityClassification,
    records: &[IncompleteRecord],
) -> Vec<C3Row> {
    let eps = analysis.cutoffs.eps_lambda;
    analysis
        .limits
        .iter()
        .filter_map(|l| {
            let v = classification.verdicts.iter().find(|v| v.zero == l.location)?;
            let tau = l.multiplicity();
            let tau_pole = match v.verdict {
                Verdict::PoleOfOrder { tau } => tau,
                _ => 0,
            };
            let qstar_multiplicity = v
                .qstar_index
                .and_then(|n| records.iter().find(|r| r.n == n))
                .map_or(0, |r| {
                    r.qstar_zeros.iter().filter(|z| z.dist(&l.location).to_f64() < eps).count()
                });
            let required = tau.saturating_sub(tau_pole);
            Some(C3Row {
                zeta: l.location.clone(),
                tau,
                tau_pole,
                qstar_multiplicity,
                required,
                satisfied: qstar_multiplicity >= required,
            })
        })
        .collect()
}
