use ftr_noma::ftr::{build_series_converged, FtrParams};
use ftr_noma::noma::{a_opt, a_range, sum_rate, sum_rate_derivative, GpaConfig, LinkBudget, Scheme};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = FtrParams> {
    (1.0f64..12.0, 1.0f64..10.0, 0.05f64..0.9, 0.15f64..0.4)
        .prop_map(|(m, k, delta, sigma)| FtrParams::new(m, k, delta, sigma).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn converged_series_is_a_distribution(p in params()) {
        let s = build_series_converged(p, 80).unwrap();
        prop_assert!((s.normalization() - 1.0).abs() < 1e-4);
        prop_assert!(s.first_moment_error() < 1e-4);
        let mean = p.mean_power();
        let mut last = 0.0;
        for i in 0..=40 {
            let x = mean * i as f64 / 8.0;
            let f = s.cdf(x);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            prop_assert!(f >= last - 1e-12, "cdf decreases at {x}");
            prop_assert!(s.pdf(x) >= -1e-12);
            last = f;
        }
    }
}

proptest! {
    #[test]
    fn optimal_fraction_beats_every_admissible_fraction(
        db in 0.0f64..60.0,
        h_p in 0.2f64..5.0,
        h_q in 0.2f64..5.0,
        t in 0.0f64..1.0,
    ) {
        let b = LinkBudget::near_far(1.0, 0.1, 10f64.powf(db / 10.0)).unwrap();
        prop_assume!(h_p > 0.1 * h_q);
        let range = a_range(&b, h_p, h_q);
        prop_assume!(!range.is_empty());
        let a = range.lower + t * (range.upper - range.lower);
        prop_assume!(a > 0.0 && a < 0.5);
        let gpa = sum_rate(Scheme::Gpa(GpaConfig::new(a).unwrap()), &b, h_p, h_q);
        let opa = sum_rate(Scheme::Opa, &b, h_p, h_q);
        let tdma = sum_rate(Scheme::Tdma, &b, h_p, h_q);
        prop_assert!(opa >= gpa - 1e-9);
        prop_assert!(gpa >= tdma - 1e-9);
        prop_assert!(sum_rate_derivative(a, &b, h_p, h_q) > 0.0);
        prop_assert!((a_opt(&b, h_q) - range.upper).abs() < 1e-15);
    }
}

#[test]
fn fixed_fraction_above_optimum_wins_at_high_snr() {
    // a = 0.2 leaves the admissible range once γ̄Q_q h_q > 16
    let b = LinkBudget::from_db(1.0, 0.1, 40.0).unwrap();
    let gpa = sum_rate(Scheme::Gpa(GpaConfig::new(0.2).unwrap()), &b, 1.0, 1.0);
    let opa = sum_rate(Scheme::Opa, &b, 1.0, 1.0);
    assert!(!a_range(&b, 1.0, 1.0).contains(0.2));
    assert!(gpa > opa);
}
