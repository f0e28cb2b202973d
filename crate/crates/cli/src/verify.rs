//! The `verify` verb: recheck stored results against their bounds.

use std::path::Path;

use hprow_core::hp::interpolation_residual;
use hprow_core::num::pow2;
use rug::Float;

use crate::analysis::Reports;
use crate::record::{RowStatus, RunDir};

#[derive(Debug, Default)]
pub struct Verification {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Schema problems are errors; bound violations are collected.
pub fn verify(root: &Path) -> anyhow::Result<Verification> {
    let dir = RunDir::load(root)?;
    let cfg = &dir.manifest.config;
    let prec = cfg.precision_bits;
    let system = cfg.system()?;
    let mut v = Verification::default();
    for r in &dir.records {
        let RowStatus::Ok { approximant: a, zeros, .. } = &r.status else {
            continue;
        };
        v.checked += 1;
        let qn = a.q().norm_inf();
        let scale = if qn > 1u32 { qn.clone() } else { Float::with_val(prec, 1u32) };
        let tol = Float::with_val(prec, pow2(prec, -(prec as i32) / 2) * &a.matrix_scale) * &scale;
        let fresh = interpolation_residual(&system, a.q(), a.n, prec);
        if fresh > tol {
            v.violations.push(format!("n={}: interpolation residual {:.3e} exceeds {:.3e}", a.n, fresh.to_f64(), tol.to_f64()));
        }
        if a.denominator.residual > tol {
            v.violations.push(format!(
                "n={}: matrix residual {:.3e} exceeds {:.3e}",
                a.n,
                a.denominator.residual.to_f64(),
                tol.to_f64()
            ));
        }
        if let Some(z) = zeros {
            if z.roots.len() + z.origin_order + z.degree_drop != z.nominal_degree {
                v.violations.push(format!("n={}: zero count does not match the degree", a.n));
            }
            let deg = (z.nominal_degree - z.degree_drop) as i32;
            let unit = Float::with_val(prec, pow2(prec, -(prec as i32) / 2) * &qn);
            for root in &z.roots {
                let r = root.abs().to_f64().max(1.0);
                let bound = unit.to_f64() * r.powi(deg);
                let res = a.q().eval(root).abs().to_f64();
                if res > bound {
                    v.violations.push(format!("n={}: |q(z)| = {res:.3e} at a stored zero exceeds {bound:.3e}", a.n));
                }
            }
        }
    }
    let reports = Reports::load(root)?;
    for inc in &reports.incomplete {
        for r in &inc.records {
            v.checked += 1;
            let bound = Float::with_val(prec, &r.difference_norm * pow2(prec, -(prec as i32) / 2));
            if r.structural_residual > bound {
                v.violations.push(format!(
                    "component {} n={}: structural residual {:.3e} exceeds {:.3e}",
                    inc.component,
                    r.n,
                    r.structural_residual.to_f64(),
                    bound.to_f64()
                ));
            }
        }
    }
    Ok(v)
}
