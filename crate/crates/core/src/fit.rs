//! Small least-squares fits in f64.

/// y ~ intercept + slope * x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linfit(xs: &[f64], ys: &[f64]) -> LinFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinFit { slope, intercept, r2 }
}

/// y ~ a + b x + c w, returned as [a, b, c]. Falls back to the plain line
/// when the normal equations are singular.
pub fn fit_affine2(xs: &[f64], ws: &[f64], ys: &[f64]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for ((x, w), y) in xs.iter().zip(ws).zip(ys) {
        let row = [1.0, *x, *w];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            let l = linfit(xs, ys);
            return [l.intercept, l.slope, 0.0];
        }
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let f = linfit(&xs, &ys);
        assert!((f.slope + 0.5).abs() < 1e-12 && (f.intercept - 3.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_regressor_recovery() {
        let xs: Vec<f64> = (10..60).map(f64::from).collect();
        let ws: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| 1.0 - 0.7 * x + 2.0 * w).collect();
        let [a, b, c] = fit_affine2(&xs, &ws, &ys);
        assert!((a - 1.0).abs() < 1e-6 && (b + 0.7).abs() < 1e-8 && (c - 2.0).abs() < 1e-6);
    }
}
