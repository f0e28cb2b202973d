//! Run configuration: TOML on disk, validated into [`RunConfig`].
//!
//! ```toml
//! [system]
//! series = ["1/(z-1) + exp(z)", "log(z-1)"]
//! m = [1, 1]
//!
//! [run]
//! n_range = [2, 60]
//! precision_bits = 512
//! normalization = "monic"          # or "unit_coeff_sum"
//! method = "auto"                  # or "exact", "float"
//! output_dir = "runs/shared_pole"
//!
//! [analyses]
//! detect = true
//! suetin = false
//! incomplete = { components = [0, 1] }
//! known_poles = [{ zeta = [1.0, 0.0], tau = 1 }]
//! combos = [{ m_star = 1, multipliers = ["1", "0"] }]
//! lattice = [{ zeta = [1.0, 0.0], m_star = 1 }]
//! ```

use std::fmt;
use std::path::PathBuf;

use hprow_core::hp::{Normalization, SolveMethod};
use hprow_core::incomplete::RmStarMethod;
use hprow_core::series::{parse_series, Kind, MultiIndex, PowerSeries, SeriesSystem};
use hprow_core::trajectory::Cutoffs;
use hprow_core::{Coefficient, Error as CoreError, Poly};
use serde::{Deserialize, Serialize};
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn at(src: &str, offset: usize, message: impl Into<String>) -> ConfigError {
    let (line, column) = position(src, offset);
    ConfigError {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    run: RawRun,
    #[serde(default)]
    analyses: Analyses,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    series: Vec<Spanned<String>>,
    m: Spanned<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    n_range: Spanned<[usize; 2]>,
    precision_bits: Spanned<u32>,
    #[serde(default)]
    normalization: Normalization,
    #[serde(default)]
    method: SolveMethod,
    output_dir: PathBuf,
    #[serde(default)]
    cutoffs: Option<Cutoffs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnownPole {
    pub zeta: [f64; 2],
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComboSpec {
    pub m_star: usize,
    /// One polynomial expression per component, e.g. "1", "0", "z - 1".
    pub multipliers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub zeta: [f64; 2],
    pub m_star: usize,
    #[serde(default = "default_max_combos")]
    pub max_combos: usize,
    #[serde(default = "default_keep")]
    pub keep: usize,
}

fn default_max_combos() -> usize {
    200
}

fn default_keep() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncompleteSpec {
    /// Components to project; empty means all.
    #[serde(default)]
    pub components: Vec<usize>,
    /// Method whose R* estimate feeds the classification.
    #[serde(default = "default_classify_method")]
    pub classify_with: RmStarMethod,
    /// delta of the outside growth probe.
    #[serde(default = "default_probe_delta")]
    pub probe_delta: f64,
}

fn default_classify_method() -> RmStarMethod {
    RmStarMethod::LogLinearRegression
}

fn default_probe_delta() -> f64 {
    0.1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default = "yes")]
    pub trajectories: bool,
    #[serde(default)]
    pub detect: bool,
    #[serde(default)]
    pub suetin: bool,
    #[serde(default)]
    pub incomplete: Option<IncompleteSpec>,
    #[serde(default)]
    pub known_poles: Vec<KnownPole>,
    #[serde(default)]
    pub combos: Vec<ComboSpec>,
    #[serde(default)]
    pub lattice: Vec<LatticeSpec>,
}

impl Default for Analyses {
    fn default() -> Self {
        Self {
            trajectories: true,
            detect: false,
            suetin: false,
            incomplete: None,
            known_poles: Vec::new(),
            combos: Vec::new(),
            lattice: Vec::new(),
        }
    }
}

/// A validated configuration. This is what the manifest echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub series: Vec<String>,
    pub m: Vec<usize>,
    pub n_range: [usize; 2],
    pub precision_bits: u32,
    pub normalization: Normalization,
    pub method: SolveMethod,
    pub output_dir: PathBuf,
    pub cutoffs: Cutoffs,
    pub analyses: Analyses,
}

impl RunConfig {
    pub fn system(&self) -> anyhow::Result<SeriesSystem> {
        let comps = self
            .series
            .iter()
            .map(|s| parse_series(s))
            .collect::<Result<Vec<PowerSeries>, _>>()?;
        Ok(SeriesSystem::new(comps, MultiIndex::new(self.m.clone())?)?)
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.n_range[0]..=self.n_range[1]
    }
}

/// The polynomial a multiplier expression denotes.
pub fn polynomial_of(src: &str, prec: u32) -> Result<Poly, String> {
    let s = parse_series(src).map_err(|e| e.to_string())?;
    match s.kind() {
        Kind::Polynomial(c) => Ok(Poly::new(c.iter().map(|x| x.with_prec(prec)).collect::<Vec<Coefficient>>()).trim()),
        _ => Err(format!("`{src}` is not a polynomial")),
    }
}

/// Parse and validate a TOML configuration.
pub fn parse(src: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        at(src, offset, e.message().to_string())
    })?;
    let mut series = Vec::new();
    for s in &raw.system.series {
        if let Err(e) = parse_series(s.get_ref()) {
            // Point into the string literal: skip its opening quote.
            let col = match e {
                CoreError::Parse { column, .. } => column,
                _ => 0,
            };
            return Err(at(src, s.span().start + 1 + col.saturating_sub(1), e.to_string()));
        }
        series.push(s.get_ref().clone());
    }
    let m = raw.system.m.get_ref().clone();
    if m.len() != series.len() {
        return Err(at(
            src,
            raw.system.m.span().start,
            format!("m has {} entries for {} series", m.len(), series.len()),
        ));
    }
    if let Err(e) = MultiIndex::new(m.clone()) {
        return Err(at(src, raw.system.m.span().start, e.to_string()));
    }
    let [lo, hi] = *raw.run.n_range.get_ref();
    let max_m = m.iter().copied().max().unwrap_or(0);
    if lo < max_m {
        return Err(at(
            src,
            raw.run.n_range.span().start,
            format!("n_range starts at {lo}, below max m_k = {max_m}"),
        ));
    }
    if hi < lo {
        return Err(at(src, raw.run.n_range.span().start, "n_range end is below its start"));
    }
    let prec = *raw.run.precision_bits.get_ref();
    if prec < 64 {
        return Err(at(src, raw.run.precision_bits.span().start, "precision_bits must be at least 64"));
    }
    let a = &raw.analyses;
    if a.suetin && series.len() != 1 {
        return Err(at(src, 0, "the suetin analysis needs a scalar system"));
    }
    if let Some(inc) = &a.incomplete {
        if let Some(k) = inc.components.iter().find(|k| **k >= series.len()) {
            return Err(at(src, 0, format!("incomplete component {k} out of range")));
        }
    }
    for c in &a.combos {
        if c.multipliers.len() != series.len() {
            return Err(at(src, 0, format!("combo has {} multipliers for {} series", c.multipliers.len(), series.len())));
        }
        for p in &c.multipliers {
            polynomial_of(p, prec).map_err(|e| at(src, 0, e))?;
        }
    }
    Ok(RunConfig {
        series,
        m,
        n_range: [lo, hi],
        precision_bits: prec,
        normalization: raw.run.normalization,
        method: raw.run.method,
        output_dir: raw.run.output_dir,
        cutoffs: raw.run.cutoffs.unwrap_or_default(),
        analyses: raw.analyses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHARED_POLE: &str = r#"
[system]
series = ["1/(z-1) + exp(z)", "log(z-1)"]
m = [1, 1]

[run]
n_range = [2, 60]
precision_bits = 512
output_dir = "out"
"#;

    #[test]
    fn shared_pole_config_parses() {
        let c = parse(SHARED_POLE).unwrap();
        assert_eq!(c.m, vec![1, 1]);
        assert_eq!(c.normalization, Normalization::Monic);
        assert!(c.analyses.trajectories && !c.analyses.detect);
    }

    #[test]
    fn range_below_row_start() {
        let src = SHARED_POLE.replace("m = [1, 1]", "m = [3, 1]");
        let e = parse(&src).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.message.contains("below max m_k"));
    }

    #[test]
    fn series_error_points_into_string() {
        let src = SHARED_POLE.replace("log(z-1)", "log(z-1");
        let e = parse(&src).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.column > 30, "{e}");
    }

    #[test]
    fn syntax_error_position() {
        let e = parse("[system]\nseries = [\"z\"\nm = [1]\n").unwrap_err();
        assert!(e.line >= 2, "{e}");
        let e = parse(&SHARED_POLE.replace("precision_bits = 512", "precision_bits = 32")).unwrap_err();
        assert_eq!((e.line, e.column), (8, 18));
    }

    #[test]
    fn multipliers_must_be_polynomials() {
        assert!(polynomial_of("exp(z)", 64).is_err());
        assert_eq!(polynomial_of("1 - z", 64).unwrap().degree(), Some(1));
        assert!(polynomial_of("0", 64).unwrap().is_zero());
    }
}
