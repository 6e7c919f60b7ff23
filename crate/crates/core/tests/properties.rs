use proptest::prelude::*;

use means_sharp::certifier::{certify_sign, f_enclosure, Interval, Sign};
use means_sharp::lemma::{f_prime, ratio};
use means_sharp::thresholds::{u_high, u_low, u_to_weight, u_zero, weight_to_u};
use means_sharp::verifier::oracle::ulp;
use means_sharp::verifier::{check_double_inequality, falsify_lower, oracle_eval, SampleConfig};
use means_sharp::{
    deviation, f, find_critical_x, lower_weight_threshold, mean, q_mean, upper_weight_threshold,
    weighted_pair, MeanKind, PositivePair, SignRegime,
};

fn positive() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn pair() -> impl Strategy<Value = PositivePair> {
    (positive(), positive()).prop_map(|(a, b)| PositivePair::new(a, b).unwrap())
}

/// Pairs with deviation at least `min_x`.
fn spread_pair(min_x: f64) -> impl Strategy<Value = PositivePair> {
    (positive(), min_x..0.999)
        .prop_map(|(a, x)| PositivePair::new(a * (1.0 + x), a * (1.0 - x)).unwrap())
}

fn power() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), 0.5f64..20.0]
}

fn ulp_distance(a: f64, b: f64) -> f64 {
    (a - b).abs() / ulp(b)
}

proptest! {
    #[test]
    fn means_are_symmetric(p in pair()) {
        for k in MeanKind::ASCENDING {
            prop_assert_eq!(mean(k, p).to_bits(), mean(k, p.swapped()).to_bits());
        }
    }

    #[test]
    fn power_of_two_scaling_is_exact(p in pair(), e in prop_oneof![Just(-40), Just(40)]) {
        let s = 2f64.powi(e);
        let scaled = PositivePair::new(p.a() * s, p.b() * s).unwrap();
        for k in MeanKind::ASCENDING {
            prop_assert_eq!(mean(k, scaled), mean(k, p) * s);
        }
    }

    #[test]
    fn means_lie_between_arguments(p in pair()) {
        let (lo, hi) = (p.a().min(p.b()), p.a().max(p.b()));
        for k in MeanKind::ASCENDING {
            let m = mean(k, p);
            prop_assert!(lo <= m && m <= hi);
            if lo != hi {
                prop_assert!(lo < m && m < hi, "{} = {m} at ({lo}, {hi})", k);
            }
        }
    }

    #[test]
    fn means_are_ordered(p in spread_pair(1e-6)) {
        let v: Vec<f64> = MeanKind::ASCENDING.iter().map(|&k| mean(k, p)).collect();
        prop_assert!(v.windows(2).all(|w| w[0] < w[1]), "{:?}", v);
    }

    #[test]
    fn q_matches_weighted_means(p in pair(), t in 0.0f64..=1.0) {
        let w = weighted_pair(p, t).unwrap();
        let s = mean(MeanKind::RootMeanSquare, w);
        let c = mean(MeanKind::ContraHarmonic, w);
        prop_assert!(ulp_distance(q_mean(p, t, 0.5).unwrap(), s) <= 4.0);
        prop_assert!(ulp_distance(q_mean(p, t, 1.0).unwrap(), c) <= 4.0);
    }

    #[test]
    fn q_increases_with_weight(
        p in spread_pair(1e-2),
        t in 0.5f64..0.99,
        gap in 1e-6f64..0.01,
        pw in power(),
    ) {
        let lo = q_mean(p, t, pw).unwrap();
        let hi = q_mean(p, t + gap, pw).unwrap();
        prop_assert!(lo < hi, "{lo} >= {hi}");
    }

    #[test]
    fn weighting_keeps_the_average_and_shrinks_the_deviation(p in pair(), t in 0.0f64..=1.0) {
        let w = weighted_pair(p, t).unwrap();
        prop_assert!(ulp_distance(w.arithmetic_mean(), p.arithmetic_mean()) <= 2.0);
        let want = (2.0 * t - 1.0).abs() * deviation(p).get();
        prop_assert!((deviation(w).get() - want).abs() <= 1e-14);
    }

    #[test]
    fn weight_and_offset_round_trip(t in 0.5f64..=1.0) {
        let back = u_to_weight(weight_to_u(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 2.0 * f64::EPSILON, "{t} -> {back}");
    }

    #[test]
    fn thresholds_are_ordered_and_fall_with_p(p in 0.5f64..500.0, k in 1.01f64..3.0) {
        let (t1, t2) = (lower_weight_threshold(p).unwrap(), upper_weight_threshold(p).unwrap());
        prop_assert!(0.5 < t1 && t1 < t2 && t2 < 1.0);
        prop_assert!(lower_weight_threshold(p * k).unwrap() < t1);
        prop_assert!(upper_weight_threshold(p * k).unwrap() < t2);
    }

    #[test]
    fn offsets_are_sandwiched(p in 0.5f64..1000.0) {
        let (lo, mid, hi) = (u_low(p).unwrap(), u_zero(p).unwrap(), u_high(p).unwrap());
        prop_assert!(lo < mid && mid < hi, "{lo} {mid} {hi}");
    }

    #[test]
    fn ratio_decreases(x in 1e-6f64..0.99, gap in 1e-3f64..0.01, p in power()) {
        prop_assert!(ratio(x, p).unwrap() > ratio(x + gap, p).unwrap());
    }

    #[test]
    fn f_sign_follows_the_offset(x in 1e-6f64..1.0, p in power(), d in 1e-3f64..0.2) {
        let up = u_high(p).unwrap() + d;
        if up <= 1.0 {
            prop_assert!(f(x, up, p).unwrap() > 0.0);
        }
        let down = u_zero(p).unwrap() - d;
        if down >= 0.0 {
            prop_assert!(f(x, down, p).unwrap() < 0.0);
        }
    }

    #[test]
    fn critical_point_separates_derivative_signs(u in 0.0f64..=1.0, p in power()) {
        match find_critical_x(u, p).unwrap() {
            SignRegime::AlwaysPositive => {
                prop_assert!(f_prime(0.5, u, p).unwrap() > 0.0);
            }
            SignRegime::AlwaysNegative => {
                prop_assert!(f_prime(0.5, u, p).unwrap() < 0.0);
            }
            SignRegime::DipThenRise { x0 } => {
                prop_assert!(x0 > 0.0 && x0 < 1.0);
                if x0 > 1e-3 {
                    prop_assert!(f_prime(x0 - 1e-3, u, p).unwrap() < 0.0);
                }
                if x0 < 1.0 - 1e-3 {
                    prop_assert!(f_prime(x0 + 1e-3, u, p).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn interval_ops_contain_point_results(
        a in -10.0f64..10.0, wa in 0.0f64..1.0, sa in 0.0f64..=1.0,
        b in 0.1f64..10.0, wb in 0.0f64..1.0, sb in 0.0f64..=1.0,
    ) {
        let x = Interval::new(a, a + wa).unwrap();
        let y = Interval::new(b, b + wb).unwrap();
        let (xv, yv) = (a + sa * wa, b + sb * wb);
        prop_assert!(x.contains(xv) && y.contains(yv));
        prop_assert!(x.add(y).contains(xv + yv));
        prop_assert!(x.sub(y).contains(xv - yv));
        prop_assert!(x.mul(y).contains(xv * yv));
        prop_assert!(x.div(y).unwrap().contains(xv / yv));
        prop_assert!(x.square().contains(xv * xv));
        prop_assert!(y.sqrt().unwrap().contains(yv.sqrt()));
        prop_assert!(y.ln().unwrap().contains(yv.ln()));
        prop_assert!(x.asinh().contains(xv.asinh()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_enclosure_contains_the_exact_value(
        lx in -12.0f64..0.0, u in 0.0f64..=1.0, p in power(),
    ) {
        let x = 10f64.powf(lx).min(1.0 - 1e-12);
        let enc = f_enclosure(Interval::point(x), u, p).unwrap();
        let want = oracle_eval("f", &[x, u, p], 30).unwrap();
        prop_assert!(want.within(enc.lo(), enc.hi()), "[{}, {}] misses {}", enc.lo(), enc.hi(), want.decimal);
    }

    #[test]
    fn certificates_survive_more_depth(
        p in power(), lo in 0.05f64..0.5, len in 0.01f64..0.45, d in 1e-3f64..0.1,
    ) {
        let u = (u_high(p).unwrap() + d).min(1.0);
        let first = certify_sign(u, p, lo, lo + len, Sign::Positive, 30).unwrap();
        if let Some(cert) = first.certificate() {
            prop_assert!(cert.replay());
            let deeper = certify_sign(u, p, lo, lo + len, Sign::Positive, 40).unwrap();
            prop_assert!(deeper.is_certified());
            prop_assert_eq!(&deeper.certificate().unwrap().leaves, &cert.leaves);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic(p in power(), seed in any::<u64>()) {
        let cfg = SampleConfig { n_uniform: 500, n_log_low: 200, n_log_high: 200, seed };
        let t1 = lower_weight_threshold(p).unwrap() + 1e-3;
        let t2 = upper_weight_threshold(p).unwrap() + 1e-3;
        let first = check_double_inequality(p, t1, t2, &cfg).unwrap();
        prop_assert_eq!(&first, &check_double_inequality(p, t1, t2, &cfg).unwrap());
        prop_assert_eq!(falsify_lower(p, t1).unwrap(), falsify_lower(p, t1).unwrap());
    }
}
