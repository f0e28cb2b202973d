//! Analyses as a pure function of the stored records and the configuration,
//! so `run` and `report` agree byte for byte.

use std::collections::BTreeMap;

use hprow_core::detectors::{
    c1_table, c2_table, c3_table, classify_zeros, combo_singularity_count, detect_system_poles, lattice_search,
    suetin_scalar, verify_attraction, AttractionCheck, C1Row, C2Row, C3Row, ComboReport, LatticeSearch,
    SingularityClassification, SuetinReport, SystemPoleReport,
};
use hprow_core::hp::HPApproximant;
use hprow_core::incomplete::{
    estimate_rm_star, hp_projection, lemma_probe, records as incomplete_records, regularize, HullForm,
    IncompletePair, IncompleteRecord, LemmaProbe, ProbeRegion, Regularization, RmStarEstimate, RmStarMethod,
};
use hprow_core::trajectory::{
    analyze_window, Cutoffs, LambdaMu, LimitPoint, NonConvergent, TrajectoryAnalysis, Window, ZeroTrajectory,
};
use hprow_core::{Complex, Error as CoreError};
use serde::{Deserialize, Serialize};

use crate::config::{polynomial_of, RunConfig};
use crate::record::{self, RowRecord};

/// Why an analysis produced no value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A detector precondition does not hold for this run.
    Hypothesis,
    Numeric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::UniquenessUnmet { .. } | CoreError::OrderingAmbiguous(_) | CoreError::WindowTooShort { .. } => {
                FailureKind::Hypothesis
            }
            _ => FailureKind::Numeric,
        };
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Failed(Failure),
}

impl<T> Outcome<T> {
    fn of(r: hprow_core::Result<T>) -> Self {
        match r {
            Ok(value) => Outcome::Ok(value),
            Err(e) => Outcome::Failed(e.into()),
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Outcome::Ok(value) => Some(value),
            Outcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            Outcome::Ok(_) => None,
            Outcome::Failed(failure) => Some(failure),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitSummary {
    pub limit: LimitPoint,
    pub lambda_mu: LambdaMu,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub window: Window,
    pub cutoffs: Cutoffs,
    pub non_unique: Vec<usize>,
    pub failures: BTreeMap<usize, String>,
    pub trajectories: Vec<ZeroTrajectory>,
    pub limits: Vec<LimitSummary>,
    pub nonconvergent: Vec<NonConvergent>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncompleteReport {
    pub component: usize,
    pub records: Vec<IncompleteRecord>,
    pub record_errors: BTreeMap<usize, String>,
    pub rm_star_trailing_max: Outcome<RmStarEstimate>,
    pub rm_star_regression: Outcome<RmStarEstimate>,
    pub classify_with: RmStarMethod,
    pub regularization: Outcome<Regularization>,
    pub outside_probe: Option<LemmaProbe>,
    pub classification: Option<SingularityClassification>,
    pub c3: Vec<C3Row>,
}

impl IncompleteReport {
    pub fn rm_star(&self) -> &Outcome<RmStarEstimate> {
        match self.classify_with {
            RmStarMethod::TrailingMax => &self.rm_star_trailing_max,
            RmStarMethod::LogLinearRegression => &self.rm_star_regression,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComboEntry {
    pub m_star: usize,
    pub multipliers: Vec<String>,
    pub report: Outcome<ComboReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub c1: Vec<C1Row>,
    pub c2: Vec<C2Row>,
    /// Keyed by component.
    pub c3: BTreeMap<usize, Vec<C3Row>>,
}

/// Everything `run` writes under reports/. Absent fields were not requested.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Reports {
    pub trajectories: Option<Outcome<TrajectoryReport>>,
    pub detect: Option<Outcome<SystemPoleReport>>,
    pub attraction: Option<Vec<AttractionCheck>>,
    pub incomplete: Vec<IncompleteReport>,
    pub suetin: Option<Outcome<SuetinReport>>,
    pub combos: Option<Vec<ComboEntry>>,
    pub lattice: Option<Vec<Outcome<LatticeSearch>>>,
    pub evidence: Option<EvidenceReport>,
}

impl Reports {
    /// Every failure, labelled by analysis.
    pub fn failures(&self) -> Vec<(String, Failure)> {
        let mut out = Vec::new();
        let mut push = |name: &str, f: Option<&Failure>| {
            if let Some(f) = f {
                out.push((name.to_string(), f.clone()));
            }
        };
        push("trajectories", self.trajectories.as_ref().and_then(Outcome::failure));
        push("detect", self.detect.as_ref().and_then(Outcome::failure));
        for r in &self.incomplete {
            let name = format!("incomplete_k{}", r.component);
            push(&name, r.rm_star().failure());
        }
        push("suetin", self.suetin.as_ref().and_then(Outcome::failure));
        for (i, c) in self.combos.iter().flatten().enumerate() {
            push(&format!("combos[{i}]"), c.report.failure());
        }
        for (i, l) in self.lattice.iter().flatten().enumerate() {
            push(&format!("lattice[{i}]"), l.failure());
        }
        out
    }

    /// Report files as (name, pretty JSON).
    pub fn files(&self) -> anyhow::Result<Vec<(String, String)>> {
        fn json<T: Serialize>(v: &T) -> anyhow::Result<String> {
            let mut s = serde_json::to_string_pretty(v)?;
            s.push('\n');
            Ok(s)
        }
        let mut out = Vec::new();
        if let Some(t) = &self.trajectories {
            out.push(("trajectories.json".into(), json(t)?));
        }
        if let Some(d) = &self.detect {
            out.push(("detect.json".into(), json(d)?));
        }
        if let Some(a) = &self.attraction {
            out.push(("attraction.json".into(), json(a)?));
        }
        for r in &self.incomplete {
            out.push((format!("incomplete_k{}.json", r.component), json(r)?));
        }
        if let Some(s) = &self.suetin {
            out.push(("suetin.json".into(), json(s)?));
        }
        if let Some(c) = &self.combos {
            out.push(("combos.json".into(), json(c)?));
        }
        if let Some(l) = &self.lattice {
            out.push(("lattice.json".into(), json(l)?));
        }
        if let Some(e) = &self.evidence {
            out.push(("evidence.json".into(), json(e)?));
        }
        Ok(out)
    }
}

fn trajectory_analysis(records: &[RowRecord], cutoffs: Cutoffs) -> hprow_core::Result<TrajectoryAnalysis> {
    let collected = record::collected(records);
    let keys: Vec<usize> = collected.roots.keys().copied().collect();
    let (Some(first), Some(last)) = (keys.first(), keys.last()) else {
        return Err(CoreError::WindowTooShort {
            got: 0,
            need: cutoffs.min_points,
        });
    };
    analyze_window(collected, Window::trailing_half(*first, *last), cutoffs)
}

/// Limit points plus the last position of every non-convergent trajectory.
fn candidate_zeros(a: &TrajectoryAnalysis) -> Vec<Complex> {
    let mut zs: Vec<Complex> = a.limits.iter().map(|l| l.location.clone()).collect();
    zs.extend(a.nonconvergent.iter().map(|n| n.last.clone()));
    zs
}

fn incomplete_report(
    cfg: &RunConfig,
    run: &[HPApproximant],
    analysis: Option<&TrajectoryAnalysis>,
    k: usize,
    method: RmStarMethod,
    probe_delta: f64,
) -> anyhow::Result<IncompleteReport> {
    let prec = cfg.precision_bits;
    let system = cfg.system()?;
    let pairs: BTreeMap<usize, IncompletePair> = run
        .iter()
        .map(|a| Ok((a.n, hp_projection(&system, k, a)?)))
        .collect::<hprow_core::Result<_>>()?;
    let mut recs = Vec::new();
    let mut record_errors = BTreeMap::new();
    for (n, r) in incomplete_records(&pairs, prec) {
        match r {
            Ok(r) => recs.push(r),
            Err(e) => {
                record_errors.insert(n, e.to_string());
            }
        }
    }
    let trailing = Outcome::of(estimate_rm_star(&recs, None, RmStarMethod::TrailingMax));
    let regression = Outcome::of(estimate_rm_star(&recs, None, RmStarMethod::LogLinearRegression));
    let chosen = match method {
        RmStarMethod::TrailingMax => &trailing,
        RmStarMethod::LogLinearRegression => &regression,
    };
    let regularization = match chosen.value() {
        Some(rm) => {
            let alpha = recs
                .iter()
                .filter(|r| rm.window.contains(r.n) && !r.a.is_zero())
                .map(|r| (r.n, r.a_abs()))
                .collect();
            Outcome::of(regularize(&alpha, rm.value, HullForm::Plain))
        }
        None => Outcome::Failed(chosen.failure().cloned().expect("failed outcome")),
    };
    let mut outside_probe = None;
    let mut classification = None;
    let mut c3 = Vec::new();
    if let Some(a) = analysis {
        let zeros = candidate_zeros(a);
        if let Some(reg) = regularization.value() {
            let f = &system.components()[k];
            let region = ProbeRegion::Outside { delta: probe_delta };
            outside_probe = Some(lemma_probe(&pairs, f, reg, region, &zeros, cfg.cutoffs.eps_mu, prec));
        }
        if let Some(rm) = chosen.value() {
            let cls = classify_zeros(&zeros, &recs, rm, regularization.value(), a);
            c3 = c3_table(a, &cls, &recs);
            classification = Some(cls);
        }
    }
    Ok(IncompleteReport {
        component: k,
        records: recs,
        record_errors,
        rm_star_trailing_max: trailing,
        rm_star_regression: regression,
        classify_with: method,
        regularization,
        outside_probe,
        classification,
        c3,
    })
}

/// Run every requested analysis.
pub fn analyze(cfg: &RunConfig, records: &[RowRecord]) -> anyhow::Result<Reports> {
    let prec = cfg.precision_bits;
    let an = &cfg.analyses;
    let run = record::approximants(records);
    let system = cfg.system()?;
    let mut out = Reports::default();

    let needs_analysis =
        an.trajectories || an.detect || an.suetin || an.incomplete.is_some() || !an.known_poles.is_empty();
    let analysis = if needs_analysis {
        Some(trajectory_analysis(records, cfg.cutoffs).map_err(Failure::from))
    } else {
        None
    };
    let ok = analysis.as_ref().and_then(|a| a.as_ref().ok());

    if an.trajectories {
        out.trajectories = Some(match &analysis {
            Some(Ok(a)) => Outcome::Ok(TrajectoryReport {
                    window: a.window,
                    cutoffs: a.cutoffs,
                    non_unique: a.collected.non_unique.clone(),
                    failures: a.collected.failures.clone(),
                    trajectories: a.trajectories.clone(),
                    limits: a
                        .limits
                        .iter()
                        .map(|l| LimitSummary {
                            limit: l.clone(),
                            lambda_mu: a.lambda_mu(&l.location),
                        })
                        .collect(),
                    nonconvergent: a.nonconvergent.clone(),
                }),
            Some(Err(f)) => Outcome::Failed(f.clone()),
            None => unreachable!(),
        });
    }

    if an.detect {
        out.detect = Some(match &analysis {
            Some(Ok(a)) => Outcome::of(detect_system_poles(&run, a, prec)),
            Some(Err(f)) => Outcome::Failed(f.clone()),
            None => unreachable!(),
        });
    }

    if let Some(a) = ok {
        if !an.known_poles.is_empty() {
            out.attraction = Some(
                an.known_poles
                    .iter()
                    .map(|p| verify_attraction(&Complex::from_f64(prec, p.zeta[0], p.zeta[1]), p.tau, a))
                    .collect(),
            );
        }
    }

    let mut components: Vec<usize> = match &an.incomplete {
        Some(spec) if spec.components.is_empty() => (0..system.d()).collect(),
        Some(spec) => spec.components.clone(),
        None => Vec::new(),
    };
    // Suetin's statement is about the scalar Padé row, component 0.
    if an.suetin && !components.contains(&0) {
        components.push(0);
    }
    components.sort_unstable();
    components.dedup();
    let (method, delta) = an
        .incomplete
        .as_ref()
        .map_or((RmStarMethod::LogLinearRegression, 0.1), |s| (s.classify_with, s.probe_delta));
    for k in components {
        out.incomplete.push(incomplete_report(cfg, &run, ok, k, method, delta)?);
    }

    if an.suetin {
        let inc = out.incomplete.iter().find(|r| r.component == 0).expect("component 0 computed");
        out.suetin = Some(match (ok, inc.rm_star()) {
            (Some(a), Outcome::Ok(rm)) => Outcome::of(suetin_scalar(&candidate_zeros(a), rm)),
            (None, _) => match &analysis {
                Some(Err(f)) => Outcome::Failed(f.clone()),
                _ => unreachable!(),
            },
            (_, Outcome::Failed(failure)) => Outcome::Failed(failure.clone()),
        });
    }

    if !an.combos.is_empty() {
        let mut entries = Vec::new();
        for c in &an.combos {
            let polys = c
                .multipliers
                .iter()
                .map(|p| polynomial_of(p, prec))
                .collect::<Result<Vec<_>, _>>()
                .map_err(anyhow::Error::msg)?;
            entries.push(ComboEntry {
                m_star: c.m_star,
                multipliers: c.multipliers.clone(),
                report: Outcome::of(combo_singularity_count(&system, c.m_star, &polys, &run, cfg.cutoffs, prec)),
            });
        }
        out.combos = Some(entries);
    }

    if !an.lattice.is_empty() {
        out.lattice = Some(
            an.lattice
                .iter()
                .map(|l| {
                    let zeta = Complex::from_f64(prec, l.zeta[0], l.zeta[1]);
                    Outcome::of(lattice_search(&system, &zeta, l.m_star, cfg.range(), l.max_combos, l.keep, prec))
                })
                .collect(),
        );
    }

    if an.detect || !an.lattice.is_empty() || an.incomplete.is_some() {
        if let Some(a) = ok {
            let searches: Vec<LatticeSearch> =
                out.lattice.iter().flatten().filter_map(|o| o.value().cloned()).collect();
            out.evidence = Some(EvidenceReport {
                c1: c1_table(a),
                c2: c2_table(a, &searches),
                c3: out.incomplete.iter().map(|r| (r.component, r.c3.clone())).collect(),
            });
        }
    }
    Ok(out)
}

