//! Invariants that must hold on every input, checked on random and
//! synthetic instances.

use std::collections::BTreeMap;

use hprow_core::detectors::{detect_system_poles, suetin_scalar};
use hprow_core::hp::{hp_approximant, normalize, pade, row_sequence, HPApproximant, Normalization, SolveMethod};
use hprow_core::incomplete::{estimate_rm_star, records, IncompletePair, RmStarMethod};
use hprow_core::num::{pow2, GaussRational};
use hprow_core::roots::{order_by_distance, roots, RootOptions};
use hprow_core::series::{parse_series, MultiIndex, PowerSeries, SeriesSystem};
use hprow_core::trajectory::{analyze, estimate_rate, lambda_mu, match_roots, Cutoffs, RateClass, Window};
use hprow_core::{Coefficient, Complex, Poly};
use proptest::prelude::*;
use rug::{Float, Rational};

const P: u32 = 192;

fn unit_box() -> impl Strategy<Value = (f64, f64)> {
    (-1.0f64..1.0, -1.0f64..1.0)
}

fn poly_of(c: &[(f64, f64)]) -> Poly {
    Poly::new(c.iter().map(|&(re, im)| Coefficient::from_f64(P, re, im)).collect())
}

fn max_coeff_dist(a: &Poly, b: &Poly) -> f64 {
    let n = a.coeffs.len().max(b.coeffs.len());
    (0..n).map(|k| a.coeff(k).value.dist(&b.coeff(k).value).to_f64()).fold(0.0, f64::max)
}

/// Rational series with small integer data: (a0 + a1 z + a2 z^2) / (1 + b1 z + b2 z^2).
fn rational_src(a: &[i64], b: &[i64]) -> String {
    format!("({} + {}z + {}z^2)/(1 + {}z/3 + {}z^2/5)", a[0], a[1], a[2], b[0], b[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_residuals_are_bounded(c in prop::collection::vec(unit_box(), 2..10)) {
        let q = poly_of(&c);
        prop_assume!(c.last().unwrap().0.hypot(c.last().unwrap().1) > 1e-3);
        let rs = roots(&q, P, RootOptions::default()).unwrap();
        prop_assert_eq!(rs.roots.len() + rs.degree_drop, q.nominal_degree());
        let deg = rs.roots.len() as i32;
        for z in &rs.roots {
            let r = z.abs().to_f64().max(1.0);
            let bound = pow2(P, -(P as i32) / 2).to_f64() * q.norm_inf().to_f64() * r.powi(deg);
            let res = q.eval(z).abs().to_f64();
            prop_assert!(res <= bound, "|q(z)| = {res:e} > {bound:e}");
        }
    }

    #[test]
    fn roots_reconstruct_the_polynomial(c in prop::collection::vec(unit_box(), 2..8)) {
        let lead = *c.last().unwrap();
        prop_assume!(lead.0.hypot(lead.1) > 0.1);
        let q = poly_of(&c);
        let rs = roots(&q, P, RootOptions::default()).unwrap();
        prop_assume!(rs.degree_drop == 0);
        let monic = Poly::from_roots(&rs.roots, P);
        let rebuilt = monic.scale(&Coefficient::from_f64(P, lead.0, lead.1));
        let d = max_coeff_dist(&rebuilt, &q);
        prop_assert!(d <= pow2(P, -(P as i32) / 4).to_f64(), "{d:e}");
    }

    #[test]
    fn ordered_distances_are_nondecreasing(zs in prop::collection::vec(unit_box(), 1..12), t in unit_box()) {
        let zs: Vec<Complex> = zs.iter().map(|&(a, b)| Complex::from_f64(P, 3.0 * a, 3.0 * b)).collect();
        let ord = order_by_distance(&zs, &Complex::from_f64(P, t.0, t.1));
        for w in ord.windows(2) {
            prop_assert!(w[0].distance <= w[1].distance);
        }
    }

    #[test]
    fn matching_is_symmetric_under_relabeling(
        a in prop::collection::vec(unit_box(), 1..7),
        b in prop::collection::vec(unit_box(), 1..7),
        rot in 0usize..7,
    ) {
        let prev: Vec<Complex> = a.iter().map(|&(x, y)| Complex::from_f64(P, x, y)).collect();
        let next: Vec<Complex> = b.iter().map(|&(x, y)| Complex::from_f64(P, x, y)).collect();
        let k = rot % prev.len();
        let mut rotated = prev.clone();
        rotated.rotate_left(k);
        let set = |pairs: Vec<(usize, usize)>, relabel: &dyn Fn(usize) -> usize| {
            let mut v: Vec<(usize, usize)> = pairs.into_iter().map(|(p, q)| (relabel(p), q)).collect();
            v.sort();
            v
        };
        let base = set(match_roots(&prev, &next), &|p| p);
        let moved = set(match_roots(&rotated, &next), &|p| (p + k) % prev.len());
        // Equal total cost is what the assignment guarantees; with random data ties have measure zero.
        prop_assert_eq!(base, moved);
    }

    #[test]
    fn geometric_rates_are_recovered(theta in 0.1f64..0.9, c in 0.1f64..10.0) {
        let d: BTreeMap<usize, Float> = (20..=60).map(|n| (n, Float::with_val(P, c * theta.powi(n as i32)))).collect();
        let est = estimate_rate(&d).unwrap();
        match est.class {
            RateClass::Geometric { theta: t } => prop_assert!((t - theta).abs() <= 0.05, "{t} vs {theta}"),
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn mu_never_exceeds_lambda(
        fast in 0.05f64..0.95,
        slow in 0.2f64..3.0,
        zeta in unit_box(),
    ) {
        let target = Complex::from_f64(P, 1.0, 0.0);
        let by_n: BTreeMap<usize, Vec<Complex>> = (10..=60)
            .map(|n| {
                let a = Complex::from_f64(P, 1.0 + fast.powi(n as i32), 0.0);
                let b = Complex::from_f64(P, 1.0, slow / n as f64);
                (n, vec![a, b])
            })
            .collect();
        for z in [target, Complex::from_f64(P, zeta.0, zeta.1)] {
            let lm = lambda_mu(&by_n, &z, Window { start: 35, end: 60 }, &Cutoffs::default());
            prop_assert!(lm.mu_hat <= lm.lambda_hat);
        }
    }

    #[test]
    fn residual_and_degree_invariants(
        a in prop::collection::vec(-4i64..=4, 3),
        b in prop::collection::vec(-4i64..=4, 2),
        m1 in 1usize..3,
        m2 in 0usize..3,
        n in 3usize..14,
    ) {
        let f1 = parse_series(&rational_src(&a, &b)).unwrap();
        let f2 = parse_series("exp(z/2) + 1/(2 - z)").unwrap();
        let m = MultiIndex::new(vec![m1, m2]).unwrap();
        let sys = SeriesSystem::new(vec![f1, f2], m.clone()).unwrap();
        prop_assume!(n >= m1.max(m2));
        for method in [SolveMethod::Auto, SolveMethod::Float] {
            let ap = hp_approximant(&sys, n, Normalization::Monic, method, P).unwrap();
            prop_assert!(ap.residual_ok(P), "residual {:e}", ap.interpolation_residual.to_f64());
            prop_assert!(ap.q().clone().trim().degree().unwrap_or(0) <= m.total());
            for (k, p) in ap.numerators.iter().enumerate() {
                let bound = n - m.entries()[k];
                prop_assert!(p.clone().trim().degree().is_none_or(|d| d <= bound), "k = {k}");
            }
        }
    }

    #[test]
    fn pade_matches_an_independent_toeplitz_solve(
        a in prop::collection::vec(-4i64..=4, 3),
        b in prop::collection::vec(-4i64..=4, 2),
        m in 1usize..=3,
        n in 3usize..=30,
    ) {
        prop_assume!(n >= m);
        let f = parse_series(&format!("{} + exp(z/3) * 0 + z^3/(1 - z/7)", rational_src(&a, &b))).unwrap();
        let c: Vec<Rational> = (0..=n)
            .map(|k| f.coeff(k, P).exact.expect("rational input").re.clone())
            .collect();
        // Rows j = n-m+1..n of sum_i b_i c_{j-i} = 0, solved by plain exact elimination.
        let mut rows: Vec<Vec<Rational>> = (n - m + 1..=n)
            .map(|j| (0..=m).map(|i| if i <= j { c[j - i].clone() } else { Rational::new() }).collect())
            .collect();
        let kernel = exact_kernel(&mut rows, m + 1);
        let ap = pade(&f, n, m, Normalization::Monic, SolveMethod::Exact, P).unwrap();
        prop_assert_eq!(ap.denominator.nullspace_dim, kernel.len());
        if kernel.len() == 1 {
            let q: Vec<GaussRational> = (0..=m).map(|i| ap.q().coeff(i).exact.unwrap()).collect();
            let v = &kernel[0];
            for i in 0..=m {
                for j in 0..=m {
                    // q and v are proportional: q_i v_j = q_j v_i.
                    let lhs = q[i].clone() * GaussRational::from_real(v[j].clone());
                    let rhs = q[j].clone() * GaussRational::from_real(v[i].clone());
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn precision_doubling_moves_coefficients_by_at_most_one_ulp(k in 0usize..60, which in 0usize..4) {
        let src = ["exp(z) + log(1 - z/3)", "sqrt(1 - z/2) * exp(-z)", "1/(z - 1/3) + exp(z)^2", "log(z - 2)"][which];
        let s = parse_series(src).unwrap();
        let lo = s.coeff(k, P);
        let hi = s.coeff(k, 2 * P);
        let bound = pow2(P, 2 - P as i32).to_f64() * (1.0 + hi.abs().to_f64());
        prop_assert!(lo.value.dist(&hi.value).to_f64() <= bound);
    }
}

/// Basis of the kernel of an exact rational matrix with `cols` columns.
fn exact_kernel(rows: &mut [Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= Rational::from(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::new(); cols];
            v[free] = Rational::from(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[row][free].clone();
            }
            v
        })
        .collect()
}

#[test]
fn coefficients_are_bit_identical_on_repeat() {
    for src in ["exp(z) + log(z - 1)", "sqrt(1 - z/2)", "1/(z-1)^2"] {
        let a = parse_series(src).unwrap().coeffs(80, P);
        let b = parse_series(src).unwrap().coeffs(80, P);
        assert!(a == b, "{src}");
    }
}

#[test]
fn rational_coefficients_follow_their_recurrence_to_200() {
    // b(z) c(z) = a(z) gives c_n = a_n - b_1 c_{n-1} - b_2 c_{n-2}.
    let f = parse_series("(1 + 2z - z^2/2)/(1 - z/2 + z^2/3)").unwrap();
    let a = [Rational::from(1), Rational::from(2), Rational::from((-1, 2))];
    let b1 = Rational::from((-1, 2));
    let b2 = Rational::from((1, 3));
    let mut c: Vec<Rational> = Vec::new();
    for n in 0..=200usize {
        let mut v = a.get(n).cloned().unwrap_or_default();
        if n >= 1 {
            v -= Rational::from(&b1 * &c[n - 1]);
        }
        if n >= 2 {
            v -= Rational::from(&b2 * &c[n - 2]);
        }
        assert_eq!(f.coeff(n, P).exact, Some(GaussRational::from_real(v.clone())), "n = {n}");
        c.push(v);
    }
}

#[test]
fn exact_and_float_paths_agree_through_40() {
    // Every component keeps a singularity near the unit circle. A component whose
    // coefficients decay like 4^-n drops below the float rank threshold well before n = 40.
    let comps: Vec<PowerSeries> = ["1/(1-z) + 1/(3-z)", "1/(1+z) + z^2", "(1+z)/(1-4z/5)", "1/(1+z^2)"]
        .iter()
        .map(|s| parse_series(s).unwrap())
        .collect();
    let sys = SeriesSystem::new(comps, MultiIndex::new(vec![1, 1, 1, 1]).unwrap()).unwrap();
    let tol = pow2(P, -(P as i32) / 2);
    let exact = row_sequence(&sys, 4..=40, Normalization::Monic, SolveMethod::Exact, P);
    let float = row_sequence(&sys, 4..=40, Normalization::Monic, SolveMethod::Float, P);
    for ((n, e), (_, f)) in exact.into_iter().zip(float) {
        let (e, f) = (e.unwrap(), f.unwrap());
        assert_eq!(e.denominator.nullspace_dim, f.denominator.nullspace_dim, "n = {n}");
        if e.denominator.is_unique() {
            let d = normalize(e.q(), Normalization::Monic, P).dist(&normalize(f.q(), Normalization::Monic, P));
            assert!(d <= tol, "n = {n}: {:e}", d.to_f64());
        }
    }
}

fn pade_pairs(run: &[HPApproximant]) -> BTreeMap<usize, IncompletePair> {
    run.iter()
        .map(|a| {
            let m = a.m.total();
            (a.n, IncompletePair { n: a.n, m, m_star: m, p: a.numerators[0].clone(), q: a.q().clone() })
        })
        .collect()
}

#[test]
fn qstar_is_bounded_on_the_unit_disc() {
    let sys = SeriesSystem::scalar(parse_series("1/(z-1/2) + 1/(z+3) + exp(z)").unwrap(), 3).unwrap();
    let run: Vec<HPApproximant> =
        row_sequence(&sys, 3..=40, Normalization::Monic, SolveMethod::Auto, P).into_iter().map(|(_, r)| r.unwrap()).collect();
    for (n, rec) in records(&pade_pairs(&run), P) {
        let rec = rec.unwrap();
        let bound = 2f64.powi(rec.qstar_zeros.len() as i32);
        for k in 0..64 {
            let t = std::f64::consts::TAU * k as f64 / 64.0;
            let z = Complex::from_f64(P, t.cos(), t.sin());
            let v = rec.qstar.eval(&z).abs().to_f64();
            assert!(v <= bound * (1.0 + 1e-12), "n = {n}: |q*| = {v} > {bound}");
        }
    }
}

#[test]
fn suetin_moduli_are_sorted_and_poles_conserved() {
    const Q: u32 = 512;
    let sys = SeriesSystem::scalar(parse_series("1/(z-1) + 1/(z+1/2) + sqrt(1 - z/3)").unwrap(), 3).unwrap();
    let run: Vec<HPApproximant> =
        row_sequence(&sys, 10..=70, Normalization::Monic, SolveMethod::Auto, Q).into_iter().map(|(_, r)| r.unwrap()).collect();
    let a = analyze(&run, Q, Cutoffs::default()).unwrap();
    let det = detect_system_poles(&run, &a, Q).unwrap();
    assert!(det.candidates.iter().map(|c| c.tau_hat).sum::<usize>() <= 3);
    let recs: Vec<_> = records(&pade_pairs(&run), Q).into_iter().filter_map(|(_, r)| r.ok()).collect();
    let rm = estimate_rm_star(&recs, None, RmStarMethod::LogLinearRegression).unwrap();
    let mut zeros: Vec<Complex> = a.limits.iter().map(|l| l.location.clone()).collect();
    zeros.extend(a.nonconvergent.iter().map(|n| n.last.clone()));
    let s = suetin_scalar(&zeros, &rm).unwrap();
    assert!(s.ordered.windows(2).all(|w| w[0].1 <= w[1].1));
    assert_eq!(s.r_m_minus_1, s.ordered.last().unwrap().1);
    assert_eq!(s.n_poles, 2);
}
