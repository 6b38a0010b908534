use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use involute_core::analysis::{approach_sequence, property_suite, Side};
use involute_core::sigma::{chain_from_target, ChainRecipe, DenseSplit, Level, SigmaConfig};
use involute_core::{BuilderConfig, BuilderState, Census, ExtendedPoint, OpenInterval, Rational, Separator, SetSpec};

fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn small_rational() -> impl Strategy<Value = (i64, i64)> {
    (-1000i64..=1000, 1i64..=1000)
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=999, 2i64..=1000).prop_filter_map("inside (0, 1)", |(p, q)| (p < q).then(|| r(p, q)))
}

fn big(q: &Rational) -> BigRational {
    q.to_string().parse().unwrap()
}

/// `⌊√2 · 10^30⌋`, from the integer square root of `2 · 10^60`.
fn sqrt2_scaled() -> BigInt {
    (BigInt::from(2) * BigInt::from(10).pow(60)).sqrt()
}

proptest! {
    #[test]
    fn ordering_matches_cross_multiplication((a, b) in small_rational(), (c, d) in small_rational()) {
        let expected = (i128::from(a) * i128::from(d)).cmp(&(i128::from(c) * i128::from(b)));
        prop_assert_eq!(r(a, b).cmp(&r(c, d)), expected);
    }

    #[test]
    fn sums_are_reduced((a, b) in small_rational(), (c, d) in small_rational()) {
        let (a, b, c, d) = (i128::from(a), i128::from(b), i128::from(c), i128::from(d));
        let (n, m) = (a * d + c * b, b * d);
        let g = gcd(n, m);
        let sum = &r(a as i64, b as i64) + &r(c as i64, d as i64);
        prop_assert_eq!(sum.to_string(), format!("{}/{}", n / g, m / g));
    }

    #[test]
    fn display_is_canonical_and_round_trips((a, b) in small_rational()) {
        let q = r(a, b);
        let text = q.to_string();
        let (n, d) = text.split_once('/').unwrap();
        let (n, d): (i128, i128) = (n.parse().unwrap(), d.parse().unwrap());
        prop_assert!(d > 0);
        prop_assert_eq!(gcd(n, d), 1);
        prop_assert_eq!(text.parse::<Rational>().unwrap(), q);
    }

    #[test]
    fn separator_comparison_matches_decimal_expansion(
        (a, b) in small_rational(),
        (p, q) in small_rational().prop_filter("nonzero", |(p, _)| *p != 0),
        (c, d) in small_rational(),
    ) {
        let g = Separator::new(r(a, b), r(p, q)).unwrap();
        let point = r(c, d);
        let scale = BigRational::from_integer(BigInt::from(10).pow(30));
        let root2 = BigRational::from_integer(sqrt2_scaled()) / scale;
        let approx = big(&r(a, b)) - big(&point) + big(&r(p, q)) * root2;
        let zero = BigRational::from_integer(BigInt::from(0));
        prop_assert_eq!(g.cmp_rational(&point), approx.cmp(&zero));
        let as_points = ExtendedPoint::Sep(g).cmp(&ExtendedPoint::Fin(point));
        prop_assert_eq!(as_points, approx.cmp(&zero));
    }

    #[test]
    fn enumeration_and_index_are_inverse(i in 0u64..20_000, which in 0usize..4) {
        let set = [
            SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::odd_denominator(r(-1, 2), r(3, 1)).unwrap(),
            SetSpec::all_rationals(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::progression(r(1, 3), r(-2, 7), None).unwrap(),
        ][which].clone();
        let q = set.enumerate(i).unwrap();
        prop_assert!(set.contains(&q));
        prop_assert_eq!(set.index_of(&q).unwrap(), Some(i));
    }

    #[test]
    fn finite_census_matches_brute_force(
        start in small_rational(), step in small_rational().prop_filter("nonzero", |(p, _)| *p != 0),
        count in 0u64..40, lo in small_rational(), width in (1i64..500, 1i64..50),
    ) {
        let set = SetSpec::progression(r(start.0, start.1), r(step.0, step.1), Some(count)).unwrap();
        let lo = r(lo.0, lo.1);
        let hi = &lo + &r(width.0, width.1);
        let within = OpenInterval::rational(lo.clone(), hi.clone()).unwrap();
        let members: Vec<Rational> = (0..count)
            .map(|i| &r(start.0, start.1) + &(&r(step.0, step.1) * &Rational::integer(i)))
            .filter(|q| lo < *q && *q < hi)
            .collect();
        let expected = if members.is_empty() { Census::Empty } else { Census::Finite(members.len() as u64) };
        prop_assert_eq!(set.census(&within), expected);
        prop_assert_eq!(set.members_in(&within), Some(members));
    }

    #[test]
    fn dense_census_is_infinite_exactly_on_overlap(lo in small_rational(), width in (1i64..50, 1i64..500)) {
        let set = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
        let lo = r(lo.0, lo.1 * 1000);
        let hi = &lo + &r(width.0, width.1);
        let overlap = lo < r(1, 1) && hi > r(0, 1);
        let census = set.census(&OpenInterval::rational(lo, hi).unwrap());
        prop_assert_eq!(census, if overlap { Census::Infinite } else { Census::Empty });
    }

    #[test]
    fn first_available_is_least_by_linear_scan(
        center in unit_rational(), k in 3u32..9, skip in proptest::collection::btree_set(0u64..60, 0..20),
    ) {
        let set = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
        let radius = Rational::inv_pow2(k);
        let within = OpenInterval::rational(&center - &radius, &center + &radius).unwrap();
        let excluded: BTreeSet<Rational> = skip.iter().map(|&i| set.enumerate(i).unwrap()).collect();
        let brute = (0..200_000u64)
            .map(|i| (set.enumerate(i).unwrap(), i))
            .find(|(q, _)| within.contains_rational(q) && !excluded.contains(q));
        prop_assume!(brute.is_some());
        prop_assert_eq!(set.first_available(&within, &excluded, 0).unwrap(), brute);
    }

    #[test]
    fn witness_terms_stay_in_their_windows(y in unit_rational(), above in any::<bool>()) {
        let q = SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap();
        let f = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
        let side = if above { Side::Above } else { Side::Below };
        prop_assume!(!f.contains(&y));
        let seq = approach_sequence(&q, &f, &y, side, 30).unwrap();
        let mut previous: Option<Rational> = None;
        for (i, t) in seq.terms.iter().enumerate() {
            let gap = (&t.value - &y).abs();
            prop_assert!(gap.is_positive());
            prop_assert!(gap <= Rational::inv_pow2(i as u32 + 2));
            prop_assert_eq!(t.value > y, above);
            if let Some(p) = &previous {
                prop_assert!(gap < (p - &y).abs());
            }
            previous = Some(t.value.clone());
        }
    }

    #[test]
    fn sigma_levels_match_direct_membership(x in unit_rational()) {
        let (u, w) = (r(1, 4), r(3, 4));
        let space = SetSpec::all_rationals(r(0, 1), r(1, 1)).unwrap();
        let chain = chain_from_target(ChainRecipe::OpenIntervalTarget { u: u.clone(), w: w.clone() }, &space).unwrap();
        let cfg = SigmaConfig { x: space, split: DenseSplit::Dyadic, chain };
        // x ∈ F_n iff n = 1 or x lies outside [u + d/2n, w − d/2n].
        let d = &w - &u;
        let in_f = |n: i64| {
            let margin = &d / &Rational::integer(2 * n);
            n == 1 || x < &u + &margin || x > &w - &margin
        };
        let level = (1..=5000i64).take_while(|&n| in_f(n)).last().unwrap();
        let expected = if level == 5000 { Level::Infinite } else { Level::finite(level as u64) };
        prop_assert_eq!(cfg.level(&x).unwrap(), expected.clone());
        let value = cfg.value(&x).unwrap();
        match expected {
            Level::Infinite => prop_assert!(value.is_zero()),
            Level::Finite(_) => {
                let magnitude = r(1, level);
                let dyadic = x.denom().trailing_zeros().map(|z| x.denom().bits() == z + 1).unwrap_or(false)
                    || *x.denom() == BigInt::from(1);
                prop_assert_eq!(value, if dyadic { magnitude } else { -magnitude });
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn construction_is_a_fixed_point_free_involution(
        lo in -3i64..3, span in 1i64..4, steps in 0usize..120, q_kind in 0usize..3,
    ) {
        let (lo, hi) = (r(lo, 1), r(lo + span, 1));
        let f = SetSpec::dyadics(lo.clone(), hi.clone()).unwrap();
        let q = match q_kind {
            0 => SetSpec::odd_denominator(lo, hi).unwrap(),
            1 => SetSpec::finite_list(vec![r(1, 3), r(-5, 3), r(7, 3)]),
            _ => SetSpec::progression(r(1, 3), r(1, 1), None).unwrap(),
        };
        let mut state = BuilderState::init(BuilderConfig::new(q.clone(), f.clone())).unwrap();
        state.run(steps).unwrap();
        for (x, fx) in state.pairs() {
            prop_assert_ne!(x, fx);
            prop_assert_eq!(state.partner(fx), Some(x));
            prop_assert!(f.contains(x));
        }
        for (_, y) in q.iter().take(steps.min(50)) {
            prop_assert_eq!(state.image(&y), Some(y.clone()));
        }
        let report = property_suite(&state, steps);
        prop_assert!(report.passed(), "{}", report.to_json());
    }
}
