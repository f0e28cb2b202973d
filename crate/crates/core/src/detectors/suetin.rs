use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incomplete::RmStarEstimate;
use crate::num::{ext_real, Complex};

use super::BOUNDARY_BAND;

/// Scalar row reading 0 < |z_1| <= ... <= |z_N| < |z_{N+1}| = ... = |z_m|.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuetinReport {
    /// Zeros sorted by modulus, with their moduli.
    pub ordered: Vec<(Complex, f64)>,
    /// Interior zeros, read as poles of f.
    pub n_poles: usize,
    pub poles: Vec<Complex>,
    /// Zeros on the outer circle, read as singular points of f.
    pub boundary: Vec<Complex>,
    /// |z_m|, the estimate of R_{m-1}(f).
    #[serde(with = "ext_real")]
    pub r_m_minus_1: f64,
    #[serde(with = "ext_real")]
    pub rm_star: f64,
}

/// Split the limit zeros of a scalar row into interior poles and the outer
/// circle of singular points.
pub fn suetin_scalar(zeros: &[Complex], rm_star: &RmStarEstimate) -> Result<SuetinReport> {
    if zeros.is_empty() {
        return Err(Error::OrderingAmbiguous("no limit zeros".into()));
    }
    let mut ordered: Vec<(Complex, f64)> = zeros.iter().map(|z| (z.clone(), z.abs().to_f64())).collect();
    ordered.sort_by(|a, b| a.1.total_cmp(&b.1));
    if ordered[0].1 == 0.0 {
        return Err(Error::OrderingAmbiguous("zero at the origin".into()));
    }
    let max = ordered.last().unwrap().1;
    let r = rm_star.value;
    let all_interior = r.is_infinite() || max < (1.0 - BOUNDARY_BAND) * r;
    let (poles, boundary): (Vec<_>, Vec<_>) = if all_interior {
        (ordered.iter().map(|z| z.0.clone()).collect(), Vec::new())
    } else {
        if (max / r - 1.0).abs() > BOUNDARY_BAND {
            return Err(Error::OrderingAmbiguous(format!(
                "largest modulus {max:.6} is off the circle |z| = {r:.6}"
            )));
        }
        let cut = (1.0 - BOUNDARY_BAND) * max;
        let (inner, outer): (Vec<_>, Vec<_>) = ordered.iter().partition(|z| z.1 < cut);
        if let Some(z) = inner.iter().find(|z| z.1 >= (1.0 - BOUNDARY_BAND) * r) {
            return Err(Error::OrderingAmbiguous(format!("modulus {:.6} sits in the boundary band", z.1)));
        }
        (
            inner.into_iter().map(|z| z.0.clone()).collect(),
            outer.into_iter().map(|z| z.0.clone()).collect(),
        )
    };
    Ok(SuetinReport {
        n_poles: poles.len(),
        poles,
        boundary,
        r_m_minus_1: max,
        rm_star: r,
        ordered,
    })
}
