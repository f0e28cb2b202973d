use serde::{Deserialize, Serialize};

use super::PowerSeries;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Multi-index m = (m_1, ..., m_d), not all zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex {
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidMultiIndex("empty multi-index".into()));
        }
        if entries.iter().all(|&e| e == 0) {
            return Err(Error::InvalidMultiIndex("all entries are zero".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// |m|.
    pub fn total(&self) -> usize {
        self.entries.iter().sum()
    }

    pub fn max_entry(&self) -> usize {
        self.entries.iter().copied().max().unwrap_or(0)
    }
}

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Self {
        m.entries
    }
}

/// A vector f of d series together with its multi-index m.
#[derive(Clone, Debug)]
pub struct SeriesSystem {
    components: Vec<PowerSeries>,
    m: MultiIndex,
}

impl SeriesSystem {
    pub fn new(components: Vec<PowerSeries>, m: MultiIndex) -> Result<Self> {
        if components.len() != m.len() {
            return Err(Error::InvalidMultiIndex(format!(
                "{} components but multi-index of length {}",
                components.len(),
                m.len()
            )));
        }
        Ok(Self { components, m })
    }

    /// A single series with row index m.
    pub fn scalar(f: PowerSeries, m: usize) -> Result<Self> {
        Self::new(vec![f], MultiIndex::new(vec![m])?)
    }

    pub fn components(&self) -> &[PowerSeries] {
        &self.components
    }

    pub fn m(&self) -> &MultiIndex {
        &self.m
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    /// Fill every component's memo table through `upto` before a parallel fan-out.
    pub fn warm(&self, upto: usize, prec: u32) {
        for f in &self.components {
            f.coeff(upto, prec);
        }
    }
}

/// Degree constraint on the multipliers of a polynomial combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeBounds {
    /// deg p_k < m_k, and p_k = 0 where m_k = 0.
    Strict,
    /// deg p_k <= m_k - m_star.
    Slack(usize),
}

/// Result of [`poly_combo`].
#[derive(Clone, Debug)]
pub struct PolyCombo {
    pub series: PowerSeries,
    /// Every multiplier is the zero polynomial.
    pub degenerate: bool,
}

/// sum_k p_k f_k under the given degree bounds.
pub fn poly_combo(system: &SeriesSystem, polys: &[Poly], bounds: DegreeBounds) -> Result<PolyCombo> {
    if polys.len() != system.d() {
        return Err(Error::InadmissibleCombination(format!(
            "{} multipliers for {} components",
            polys.len(),
            system.d()
        )));
    }
    let mut terms = Vec::new();
    for (k, (p, f)) in polys.iter().zip(system.components()).enumerate() {
        let mk = system.m().entries()[k];
        let Some(deg) = p.degree() else { continue };
        let ok = match bounds {
            DegreeBounds::Strict => deg < mk,
            DegreeBounds::Slack(ms) => mk >= ms && deg <= mk - ms,
        };
        if !ok {
            return Err(Error::InadmissibleCombination(format!(
                "multiplier {k} has degree {deg} against m_{k} = {mk} under {bounds:?}"
            )));
        }
        let mult = PowerSeries::polynomial(p.clone().trim().coeffs);
        terms.push(match p.clone().trim().coeffs.as_slice() {
            [c] if c.exact.as_ref().is_some_and(|e| *e == crate::num::GaussRational::one()) => f.clone(),
            [c] => PowerSeries::scalar_multiple(c.clone(), f.clone()),
            _ => PowerSeries::product(mult, f.clone()),
        });
    }
    let degenerate = terms.is_empty();
    let series = match terms.len() {
        0 => PowerSeries::zero(),
        1 => terms.pop().unwrap(),
        _ => PowerSeries::sum(terms),
    };
    Ok(PolyCombo { series, degenerate })
}
