//! Cross-module structural laws checked on randomized inputs: slope
//! bookkeeping of composed fillings, trace-coordinate persistence, the
//! 2 pi gate, and asymptotic sharpness of the octahedral bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use rodcomp::contfrac::{eval_cf, ContinuedFraction, Rational};
use rodcomp::dehnfill::{
    compose_slopes, nested_trace, parent_manifold, slope_length, two_pi_check, FillingSlope,
};
use rodcomp::rodmodel::StackedConfig;
use rodcomp::volbounds::{orthogonal_bounds, BoundMethod, V_OCT};

fn cf_terms() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 0..=8).prop_map(|mut terms| {
        for t in terms.iter_mut().skip(1) {
            if *t == 0 {
                *t = 1;
            }
        }
        terms
    })
}

fn cf_of(terms: &[i64]) -> ContinuedFraction {
    ContinuedFraction::from_i64s(terms).unwrap()
}

proptest! {
    #[test]
    fn composed_slope_count_matches_term_count(families in prop::collection::vec(cf_terms(), 0..=4)) {
        let cfs: Vec<ContinuedFraction> = families.iter().map(|t| cf_of(t)).collect();
        let slopes = compose_slopes(&cfs);
        let sum_m: usize = cfs.iter().map(ContinuedFraction::len).sum();
        let participants = cfs.iter().filter(|c| !c.is_empty()).count();
        prop_assert_eq!(slopes.len(), 2 * sum_m - participants.min(2 * sum_m));
        let outermost = slopes.iter().filter(|s| s.is_outermost()).count();
        prop_assert_eq!(outermost, participants);
    }

    #[test]
    fn untouched_trace_coordinate_persists(terms in cf_terms()) {
        let c = cf_of(&terms);
        let trace = nested_trace(&c);
        prop_assert_eq!(trace.len(), c.len() + 1);
        let m = c.len();
        for (t, pair) in trace.windows(2).enumerate() {
            let i = m - t;
            let fixed = if i % 2 == 1 { 1 } else { 0 };
            prop_assert_eq!(
                pair[0].coords()[fixed].abs(),
                pair[1].coords()[fixed].abs(),
                "step {} fixes coordinate {}", t, fixed
            );
            prop_assert!(pair[1].coords()[2].is_zero());
        }
    }

    #[test]
    fn two_pi_gate_is_exactly_the_floor_six(ells in prop::collection::vec(-12i64..=12, 1..=8)) {
        prop_assume!(ells.iter().all(|&e| e != 0));
        let slopes: Vec<FillingSlope> = ells
            .iter()
            .enumerate()
            .map(|(i, &e)| FillingSlope::new(0, i + 2, BigInt::from(e)))
            .collect();
        let check = two_pi_check(&slopes).unwrap();
        let floor = ells.iter().map(|e| e.abs()).min().unwrap();
        prop_assert_eq!(check.passes, floor >= 6);
    }

    #[test]
    fn slope_length_is_even_and_monotone(a in -40i64..=40, b in -40i64..=40) {
        let la = slope_length(&BigInt::from(a));
        prop_assert_eq!(la, slope_length(&BigInt::from(-a)));
        prop_assert!(la >= 2.0);
        let lb = slope_length(&BigInt::from(b));
        if a.abs() < b.abs() {
            prop_assert!(la < lb);
        }
    }

    #[test]
    fn parent_counts_agree_with_expansions(families in prop::collection::vec(cf_terms(), 2..=4)) {
        let cfs: Vec<ContinuedFraction> = families.iter().map(|t| cf_of(t)).collect();
        let n = cfs.len();
        let horizontal: Vec<(BigInt, BigInt, Rational)> = cfs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let v = eval_cf(c);
                let z = Rational::from_i64((n - i) as i64, n as i64 + 1).unwrap();
                (v.numer().clone(), v.denom().clone(), z)
            })
            .collect();
        let half = Rational::from_i64(1, 2).unwrap();
        let config = StackedConfig::new(horizontal, vec![(half.clone(), half)]).unwrap();
        let report = match parent_manifold(&config, &cfs) {
            Ok(r) => r,
            Err(_) => return Ok(()), // neighbouring slopes coincided
        };
        let m = &report.manifold;
        let sum_m: usize = cfs.iter().map(ContinuedFraction::len).sum();
        prop_assert_eq!(m.sum_m(), sum_m);
        prop_assert_eq!(m.filling_rod_count, 2 * sum_m);
        prop_assert_eq!(m.octahedron_count, 2 * sum_m);
        prop_assert_eq!(m.volume_units, 2 * sum_m);
        let even = cfs.iter().filter(|c| !c.is_empty() && c.len() % 2 == 0).count();
        let odd = cfs.iter().filter(|c| c.len() % 2 == 1).count();
        prop_assert_eq!((m.even_families, m.odd_families), (even, odd));
        let participants = cfs.iter().filter(|c| !c.is_empty()).count();
        prop_assert_eq!(m.slopes.len(), 2 * sum_m - participants);
    }
}

fn constant_family_stack(k: u32) -> (StackedConfig, Vec<ContinuedFraction>) {
    let family = ContinuedFraction::constant_family(k);
    let value = eval_cf(&family);
    let horizontal = vec![
        (
            value.numer().clone(),
            value.denom().clone(),
            Rational::from_i64(2, 3).unwrap(),
        ),
        (
            BigInt::zero(),
            BigInt::one(),
            Rational::from_i64(1, 3).unwrap(),
        ),
    ];
    let half = Rational::from_i64(1, 2).unwrap();
    let config = StackedConfig::new(horizontal, vec![(half.clone(), half)]).unwrap();
    (config, vec![family, ContinuedFraction::from_i64s(&[0]).unwrap()])
}

#[test]
fn sharp_ratio_matches_closed_form() {
    for n in 6..=60i64 {
        let config = StackedConfig::standard(&[(n, 1), (0, 1)]).unwrap();
        let cfs = [
            ContinuedFraction::from_i64s(&[n]).unwrap(),
            ContinuedFraction::from_i64s(&[0]).unwrap(),
        ];
        let b = orthogonal_bounds(&config, &cfs).unwrap();
        assert!(matches!(b.lower_method, BoundMethod::OrthLower { .. }));
        let factor =
            (1.0 - 4.0 * std::f64::consts::PI.powi(2) / (n * n + 4) as f64).powf(1.5);
        assert!((b.lower / b.upper - factor).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn octahedral_bounds_become_asymptotically_sharp() {
    for k in [6u32, 60, 600] {
        let (config, cfs) = constant_family_stack(k);
        let b = orthogonal_bounds(&config, &cfs).unwrap();
        let sum_m = b.sum_m.unwrap() as f64;
        assert!((b.upper / sum_m - 2.0 * V_OCT).abs() < 1e-9, "k = {k}");
        let gap = 1.0 - b.lower / b.upper;
        assert!(gap > 0.0 && gap < 90.0 / (k as f64 * k as f64), "k = {k}: gap {gap}");
    }
}
