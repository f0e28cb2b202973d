//! Oracle tests: results compared with closed forms or an independent path.

use hprow_core::hp::{hp_approximant, normalize, pade, Normalization, SolveMethod};
use hprow_core::num::{pow2, GaussRational};
use hprow_core::series::{parse_series, MultiIndex, PowerSeries, SeriesSystem};
use rug::{Integer, Rational};

const P: u32 = 256;

fn q_exact(a: &hprow_core::hp::HPApproximant) -> Vec<GaussRational> {
    a.q().clone().trim().exact_coeffs().expect("exact denominator")
}

fn factorial(k: usize) -> Integer {
    Integer::from(Integer::factorial(k as u32))
}

#[test]
fn exp_pade_denominators_match_the_closed_form() {
    // Q_{L,M}(z) = sum_j (L+M-j)! M! / ((L+M)! j! (M-j)!) (-z)^j, made monic.
    let f = parse_series("exp(z)").unwrap();
    for (n, m) in [(2, 1), (4, 2), (7, 3), (9, 4), (12, 6)] {
        let l = n - m;
        let a = pade(&f, n, m, Normalization::Monic, SolveMethod::Exact, P).unwrap();
        let mut want: Vec<Rational> = (0..=m)
            .map(|j| {
                let num = factorial(l + m - j) * factorial(m);
                let den = factorial(l + m) * factorial(j) * factorial(m - j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                Rational::from((num * sign, den))
            })
            .collect();
        let lead = want[m].clone();
        for w in &mut want {
            *w /= &lead;
        }
        let want: Vec<GaussRational> = want.into_iter().map(GaussRational::from_real).collect();
        assert_eq!(q_exact(&a), want, "type ({l}, {m})");
    }
}

#[test]
fn exact_and_float_kernels_agree() {
    let comps: Vec<PowerSeries> = ["1/(1-z) + 1/(3-z)", "1/(2+z)", "(1+z)/(1-z/4)"]
        .iter()
        .map(|s| parse_series(s).unwrap())
        .collect();
    let sys = SeriesSystem::new(comps, MultiIndex::new(vec![2, 1, 1]).unwrap()).unwrap();
    let tol = pow2(P, -(P as i32) / 2);
    for n in 2..=16 {
        let e = hp_approximant(&sys, n, Normalization::Monic, SolveMethod::Exact, P).unwrap();
        let f = hp_approximant(&sys, n, Normalization::Monic, SolveMethod::Float, P).unwrap();
        assert!(e.denominator.exact_path && !f.denominator.exact_path);
        assert_eq!(e.denominator.nullspace_dim, f.denominator.nullspace_dim, "n = {n}");
        if e.denominator.is_unique() {
            let d = normalize(e.q(), Normalization::Monic, P).dist(&normalize(f.q(), Normalization::Monic, P));
            assert!(d <= tol, "n = {n}: {}", d.to_f64());
        }
    }
}

#[test]
fn series_coefficients_match_closed_forms_up_to_200() {
    let sqrt = parse_series("sqrt(1 - z)").unwrap();
    let log = parse_series("log(1 - z)").unwrap();
    let inv = parse_series("1/(1 - z)^2").unwrap();
    // sqrt(1-z): c_k = c_{k-1} (k - 3/2) / k.
    let mut c = Rational::from(1);
    for k in 0..=200usize {
        if k > 0 {
            c *= Rational::from((2 * k as i64 - 3, 2 * k as i64));
        }
        assert_eq!(sqrt.coeff(k, P).exact, Some(GaussRational::from_real(c.clone())), "sqrt k = {k}");
        let lk = if k == 0 { Rational::new() } else { Rational::from((-1, k as i64)) };
        assert_eq!(log.coeff(k, P).exact, Some(GaussRational::from_real(lk)), "log k = {k}");
        assert_eq!(inv.coeff(k, P).exact, Some(GaussRational::from_int(k as i64 + 1)), "inverse square k = {k}");
    }
}

#[test]
fn reduced_rational_pade_is_the_function_itself() {
    // Poles at 2 and -3: the monic denominator is z^2 + z - 6 for every n >= 2m.
    let f = parse_series("(1 + z)/((1 - z/2)(1 + z/3))").unwrap();
    let want = [GaussRational::from_int(-6), GaussRational::from_int(1), GaussRational::from_int(1)];
    for n in 4..=12 {
        let a = pade(&f, n, 2, Normalization::Monic, SolveMethod::Auto, P).unwrap();
        assert!(a.denominator.exact_path);
        assert_eq!(q_exact(&a), want, "n = {n}");
        assert!(a.interpolation_residual.is_zero());
    }
}
