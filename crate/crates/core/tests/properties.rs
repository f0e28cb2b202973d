//! Property tests for the exact building blocks.

use std::collections::BTreeMap;

use hprow_core::incomplete::{regularize, HullForm};
use hprow_core::num::{Complex, GaussRational};
use hprow_core::roots::{roots, RootOptions};
use hprow_core::series::{parse_series, PowerSeries};
use hprow_core::trajectory::{build_trajectories, match_roots};
use hprow_core::{Coefficient, Poly};
use proptest::prelude::*;
use rug::Float;

const P: u32 = 128;

fn exact_poly(c: &[i64]) -> PowerSeries {
    let v: Vec<GaussRational> = c.iter().map(|&x| GaussRational::from_int(x)).collect();
    PowerSeries::polynomial_exact(&v)
}

fn small_ints(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_the_cauchy_convolution(a in small_ints(1..6), b in small_ints(1..6), c in 1i64..4) {
        // (a / (1 - z/c)) * b, checked against the convolution of coefficient lists.
        let geo = parse_series(&format!("1/(1 - z/{c})")).unwrap();
        let left = PowerSeries::product(exact_poly(&a), geo.clone());
        let prod = PowerSeries::product(left.clone(), exact_poly(&b));
        for k in 0..12 {
            let mut want = GaussRational::zero();
            for (j, bj) in b.iter().enumerate() {
                if j <= k {
                    let lk = left.coeff(k - j, P).exact.expect("exact input");
                    want = want + lk * GaussRational::from_int(*bj);
                }
            }
            prop_assert_eq!(prod.coeff(k, P).exact, Some(want));
        }
    }

    #[test]
    fn exp_times_exp_neg_is_one(k in 1usize..30) {
        let f = parse_series("exp(z) * exp(-z)").unwrap();
        let c = f.coeff(k, P);
        prop_assert!(c.abs().to_f64() < 1e-30, "coefficient {k} = {}", c.abs().to_f64());
    }

    #[test]
    fn hull_majorizes_and_is_concave(
        logs in prop::collection::vec(-30.0f64..5.0, 3..40),
        start in 1usize..20,
        r in 0.5f64..3.0,
    ) {
        let alpha: BTreeMap<usize, Float> = logs
            .iter()
            .enumerate()
            .map(|(i, l)| (start + i, Float::with_val(P, l.exp())))
            .collect();
        let reg = regularize(&alpha, r, HullForm::Plain).unwrap();
        prop_assert!(reg.checks.majorizes);
        prop_assert!(reg.checks.concave);
        prop_assert!(reg.checks.contact_exact);
        prop_assert!(reg.is_contact(start) && reg.is_contact(start + logs.len() - 1));
    }

    #[test]
    fn matching_recovers_a_permutation(
        pts in prop::collection::vec((-4i32..=4, -4i32..=4), 1..8),
        seed in any::<u64>(),
    ) {
        let mut pts = pts;
        pts.sort();
        pts.dedup();
        let prev: Vec<Complex> = pts.iter().map(|&(x, y)| Complex::from_f64(P, x as f64, y as f64)).collect();
        // Deterministic shuffle and a perturbation far below the lattice spacing.
        let mut order: Vec<usize> = (0..prev.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let next: Vec<Complex> = order
            .iter()
            .map(|&i| &prev[i] + &Complex::from_f64(P, 0.01, -0.01))
            .collect();
        let mut pairs = match_roots(&prev, &next);
        pairs.sort();
        prop_assert_eq!(pairs.len(), prev.len());
        for (p, q) in pairs {
            prop_assert_eq!(order[q], p);
        }
    }

    #[test]
    fn roots_of_a_product_of_linear_factors(zs in prop::collection::vec((-3i32..=3, -3i32..=3), 1..7)) {
        let mut zs = zs;
        zs.sort();
        zs.dedup();
        let want: Vec<Complex> = zs.iter().map(|&(x, y)| Complex::from_f64(P, x as f64 / 2.0, y as f64 / 2.0)).collect();
        let q = Poly::from_roots(&want, P);
        let got = roots(&q, P, RootOptions::default()).unwrap();
        prop_assert_eq!(got.roots.len(), want.len());
        for w in &want {
            let best = got.roots.iter().map(|g| g.dist(w).to_f64()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-25, "{best}");
        }
    }
}

#[test]
fn trajectories_follow_smoothly_moving_zeros() {
    // Two zeros approaching 1 and -1 from opposite sides, listed in alternating order.
    let mut by_n = BTreeMap::new();
    for n in 1..=20usize {
        let e = 1.0 / n as f64;
        let a = Complex::from_f64(P, 1.0 + e, 0.0);
        let b = Complex::from_f64(P, -1.0 - e, 0.0);
        by_n.insert(n, if n % 2 == 0 { vec![a, b] } else { vec![b, a] });
    }
    let ts = build_trajectories(&by_n);
    assert_eq!(ts.len(), 2);
    for t in &ts {
        let sign = t.path[&1].re.to_f64().signum();
        assert!(t.path.values().all(|z| z.re.to_f64().signum() == sign));
        assert_eq!(t.path.len(), 20);
    }
}

#[test]
fn coefficient_exactness_survives_products_and_quotients() {
    let f = parse_series("(1 + 2z)/(1 - z/3) * (z - 1)").unwrap();
    assert!(f.is_exact_through(30, P));
    let c: Coefficient = f.coeff(0, P);
    assert_eq!(c.exact, Some(GaussRational::from_int(-1)));
}
