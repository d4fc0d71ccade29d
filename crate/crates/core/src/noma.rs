//! Link budget, SINRs, power allocation and the scheme comparisons built on them.

use std::f64::consts::LN_2;

use crate::error::{domain, invalid, Result};
use crate::ftr::{sample_link, FtrParams};
use crate::montecarlo::stats::{wilson_interval, ProportionEstimate};
use crate::par::Execution;
use crate::rng::derive_seed;

/// Deterministic link gains and average transmit SNR (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    q_p: f64,
    q_q: f64,
    gamma_bar: f64,
}

impl LinkBudget {
    /// Gains must be positive. The near-far ordering Q_p > Q_q is checked by
    /// [`LinkBudget::near_far`]; symmetric budgets are allowed here for per-state work.
    pub fn new(q_p: f64, q_q: f64, gamma_bar: f64) -> Result<Self> {
        for (name, v) in [("q_p", q_p), ("q_q", q_q), ("gamma_bar", gamma_bar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v}; must be a positive finite number")));
            }
        }
        Ok(Self { q_p, q_q, gamma_bar })
    }

    /// Budget with the near user holding the stronger deterministic link.
    pub fn near_far(q_p: f64, q_q: f64, gamma_bar: f64) -> Result<Self> {
        let b = Self::new(q_p, q_q, gamma_bar)?;
        if q_p <= q_q {
            return Err(invalid("q_p", format!("{q_p} must exceed q_q = {q_q}")));
        }
        Ok(b)
    }

    pub fn from_db(q_p: f64, q_q: f64, gamma_bar_db: f64) -> Result<Self> {
        Self::new(q_p, q_q, db_to_linear(gamma_bar_db))
    }

    pub fn q_p(&self) -> f64 {
        self.q_p
    }

    pub fn q_q(&self) -> f64 {
        self.q_q
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn with_gamma_bar(&self, gamma_bar: f64) -> Result<Self> {
        Self::new(self.q_p, self.q_q, gamma_bar)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Fixed near-user power fraction, 0 < a < 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpaConfig {
    a: f64,
}

impl GpaConfig {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return Err(invalid("a", format!("{a}; must satisfy 0 < a < 0.5")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// a_th = 1 − a − aγ_th.
    pub fn a_th(&self, gamma_th: f64) -> f64 {
        1.0 - self.a - self.a * gamma_th
    }
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Gpa(GpaConfig),
    Opa,
    Tdma,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Gpa(_) => "gpa",
            Scheme::Opa => "opa",
            Scheme::Tdma => "tdma",
        }
    }
}

/// (γ_p, γ_q) under a fixed power fraction `a`.
pub fn sinr_gpa(a: f64, budget: &LinkBudget, h_p: f64, h_q: f64) -> (f64, f64) {
    let g = budget.gamma_bar;
    let x_q = g * budget.q_q * h_q;
    (a * g * budget.q_p * h_p, (1.0 - a) * x_q / (a * x_q + 1.0))
}

/// Sum-rate optimal fraction 1/(√(1+γ̄Q_q h_q) + 1).
pub fn a_opt(budget: &LinkBudget, h_q: f64) -> f64 {
    1.0 / ((1.0 + budget.gamma_bar * budget.q_q * h_q).sqrt() + 1.0)
}

/// Admissible power fractions for which both users beat their TDMA rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRange {
    pub lower: f64,
    pub upper: f64,
}

impl PowerRange {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    pub fn contains(&self, a: f64) -> bool {
        self.lower <= a && a <= self.upper
    }
}

pub fn a_range(budget: &LinkBudget, h_p: f64, h_q: f64) -> PowerRange {
    let g = budget.gamma_bar;
    PowerRange {
        lower: 1.0 / ((1.0 + g * budget.q_p * h_p).sqrt() + 1.0),
        upper: a_opt(budget, h_q),
    }
}

/// (γ_p, γ_q) with a = a_opt.
pub fn sinr_opa(budget: &LinkBudget, h_p: f64, h_q: f64) -> (f64, f64) {
    let root = (1.0 + budget.gamma_bar * budget.q_q * h_q).sqrt();
    (budget.gamma_bar * budget.q_p * h_p / (root + 1.0), root - 1.0)
}

/// Instantaneous sum rate in bits/s/Hz.
pub fn sum_rate(scheme: Scheme, budget: &LinkBudget, h_p: f64, h_q: f64) -> f64 {
    let (gp, gq) = match scheme {
        Scheme::Gpa(cfg) => sinr_gpa(cfg.a, budget, h_p, h_q),
        Scheme::Opa => sinr_opa(budget, h_p, h_q),
        Scheme::Tdma => {
            let g = budget.gamma_bar;
            return 0.5 * (g * budget.q_p * h_p).ln_1p() / LN_2 + 0.5 * (g * budget.q_q * h_q).ln_1p() / LN_2;
        }
    };
    (gp.ln_1p() + gq.ln_1p()) / LN_2
}

/// ∂R_sum/∂a for the fixed-fraction scheme.
pub fn sum_rate_derivative(a: f64, budget: &LinkBudget, h_p: f64, h_q: f64) -> f64 {
    let g = budget.gamma_bar;
    let xp = budget.q_p * h_p;
    let xq = budget.q_q * h_q;
    g * (xp - xq) / ((a * g * xp + 1.0) * (a * g * xq + 1.0)) / LN_2
}

/// Monte-Carlo estimate of Pr{Q_p h_p > Q_q h_q} at Q_p/Q_q = `ratio`.
pub fn prob_channel_order(
    ratio: f64,
    params_p: &FtrParams,
    params_q: &FtrParams,
    n: usize,
    seed: u64,
) -> Result<ProportionEstimate> {
    if !(ratio > 0.0) {
        return Err(invalid("ratio", format!("{ratio}; must be > 0")));
    }
    if n < 10_000 {
        return Err(invalid("n", format!("{n}; at least 10^4 samples required")));
    }
    let hp = sample_link(params_p, n, derive_seed(seed, 1), 0, Execution::Auto);
    let hq = sample_link(params_q, n, derive_seed(seed, 2), 0, Execution::Auto);
    let hits = hp.iter().zip(&hq).filter(|(p, q)| ratio * **p > **q).count() as u64;
    Ok(wilson_interval(hits, n as u64, 1.959_963_984_540_054))
}

/// (1 − a_opt)/a_opt = √(1+γ̄Q_q h_q): near-user to far-user power ratio under OPA.
pub fn sic_power_ratio(budget: &LinkBudget, h_q: f64) -> f64 {
    (1.0 + budget.gamma_bar * budget.q_q * h_q).sqrt()
}

/// γ̄ below which user p's outage is worse under GPA than under OPA, for fixed h_q.
pub fn crossover_gamma_bar(a: f64, budget: &LinkBudget, h_q: f64) -> Result<f64> {
    if !(h_q > 0.0) {
        return Err(domain("crossover_gamma_bar", format!("h_q = {h_q}, need h_q > 0")));
    }
    Ok((1.0 / a - 2.0) / (budget.q_q * h_q * a))
}

/// γ_th at which user q's outage order between GPA and OPA flips.
pub fn crossover_gamma_th(a: f64) -> f64 {
    1.0 / a - 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit(g: f64) -> LinkBudget {
        LinkBudget::new(1.0, 1.0, g).unwrap()
    }

    #[test]
    fn sinr_examples() {
        let (gp, gq) = sinr_gpa(0.2, &unit(10.0), 1.0, 1.0);
        assert_relative_eq!(gp, 2.0, max_relative = 1e-15);
        assert_relative_eq!(gq, 8.0 / 3.0, max_relative = 1e-15);
        assert_eq!(sinr_gpa(0.2, &unit(10.0), 0.0, 0.0), (0.0, 0.0));
        let (_, gq) = sinr_gpa(0.4999, &unit(10.0), 1.0, 1e12);
        assert!((gq - 0.5001 / 0.4999).abs() < 1e-6);
        let (gp, gq) = sinr_opa(&unit(3.0), 2.0, 1.0);
        assert_relative_eq!(gq, 1.0, max_relative = 1e-15);
        assert_relative_eq!(gp, 2.0, max_relative = 1e-15);
        let (gp, gq) = sinr_opa(&unit(3.0), 2.0, 0.0);
        assert_eq!((gp, gq), (3.0, 0.0));
    }

    #[test]
    fn power_fractions() {
        assert_relative_eq!(a_opt(&unit(99.0), 1.0), 1.0 / 11.0, max_relative = 1e-15);
        assert_eq!(a_opt(&unit(99.0), 0.0), 0.5);
        assert_relative_eq!(a_opt(&unit(3.0), 1.0), 1.0 / 3.0, max_relative = 1e-15);
        let r = a_range(&unit(1.0), 99.0, 3.0);
        assert_relative_eq!(r.lower, 1.0 / 11.0, max_relative = 1e-15);
        assert_relative_eq!(r.upper, 1.0 / 3.0, max_relative = 1e-15);
        let r = a_range(&unit(1.0), 2.0, 2.0);
        assert_eq!(r.lower, r.upper);
        assert!(a_range(&unit(1.0), 3.0, 99.0).is_empty());
    }

    #[test]
    fn ratios_and_crossovers() {
        assert_relative_eq!(sic_power_ratio(&unit(99.0), 1.0), 10.0, max_relative = 1e-15);
        assert_eq!(sic_power_ratio(&unit(99.0), 0.0), 1.0);
        assert_relative_eq!(crossover_gamma_bar(0.2, &unit(1.0), 1.0).unwrap(), 15.0, max_relative = 1e-14);
        assert!(crossover_gamma_bar(0.4999999, &unit(1.0), 1.0).unwrap() < 1e-5);
        assert!(crossover_gamma_bar(0.2, &unit(1.0), 0.0).is_err());
        assert_relative_eq!(crossover_gamma_th(0.2), 3.0, max_relative = 1e-14);
        assert_relative_eq!(crossover_gamma_th(0.25), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_channels_have_zero_rate() {
        for s in [Scheme::Gpa(GpaConfig::new(0.2).unwrap()), Scheme::Opa, Scheme::Tdma] {
            assert_eq!(sum_rate(s, &unit(10.0), 0.0, 0.0), 0.0);
        }
        assert_eq!(sum_rate_derivative(0.3, &unit(5.0), 1.0, 1.0), 0.0);
    }

    #[test]
    fn validation() {
        assert!(GpaConfig::new(0.5).is_err());
        assert!(GpaConfig::new(0.0).is_err());
        assert!(LinkBudget::new(1.0, 0.0, 1.0).is_err());
        assert!(LinkBudget::near_far(1.0, 1.0, 1.0).is_err());
        assert!(LinkBudget::near_far(1.5, 0.15, 1.0).is_ok());
        assert_relative_eq!(LinkBudget::from_db(1.0, 0.1, 30.0).unwrap().gamma_bar(), 1000.0, max_relative = 1e-14);
    }

    #[test]
    fn channel_order_limits() {
        let p = FtrParams::new(3.5, 5.0, 0.5, 0.3162).unwrap();
        let est = prob_channel_order(1.0, &p, &p, 100_000, 11).unwrap();
        assert!((est.estimate - 0.5).abs() < 3.0 * (est.hi - est.lo) / 2.0 / 1.96 * 1.96);
        let est = prob_channel_order(1e9, &p, &p, 20_000, 11).unwrap();
        assert_eq!(est.estimate, 1.0);
    }

    fn state() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (-10.0..50.0f64, 0.01..10.0f64, 0.001..1.0f64, 0.0..20.0f64, 0.0..20.0f64)
    }

    proptest! {
        #[test]
        fn opa_is_gpa_at_optimum((db, qp, qq, hp, hq) in state()) {
            let b = LinkBudget::new(qp, qq, db_to_linear(db)).unwrap();
            let (a1, a2) = sinr_gpa(a_opt(&b, hq), &b, hp, hq);
            let (o1, o2) = sinr_opa(&b, hp, hq);
            prop_assert!((a1 - o1).abs() <= 1e-12 * o1.abs().max(1e-300));
            prop_assert!((a2 - o2).abs() <= 1e-12 * o2.abs().max(1e-300) + 1e-15);
            let ao = a_opt(&b, hq);
            prop_assert!(ao > 0.0 && ao <= 0.5);
            prop_assert_eq!(a_range(&b, hp, hq).upper, ao);
            prop_assert!(sic_power_ratio(&b, hq) >= 1.0);
        }

        #[test]
        fn derivative_sign_and_finite_difference((db, qp, qq, hp, hq) in state(), a in 0.05..0.95f64) {
            let b = LinkBudget::new(qp, qq, db_to_linear(db)).unwrap();
            let d = sum_rate_derivative(a, &b, hp, hq);
            let diff = qp * hp - qq * hq;
            prop_assert!(d == 0.0 || d.signum() == diff.signum());
            let step = 1e-6;
            let rate = |x: f64| {
                let (gp, gq) = sinr_gpa(x, &b, hp, hq);
                (gp.ln_1p() + gq.ln_1p()) / LN_2
            };
            let fd = (rate(a + step) - rate(a - step)) / (2.0 * step);
            prop_assert!((fd - d).abs() <= 1e-5 * d.abs().max(1e-3));
        }

        #[test]
        fn opa_beats_tdma_and_gpa((db, qq, hp, hq) in (-10.0..50.0f64, 0.001..1.0f64, 0.0..20.0f64, 0.0..20.0f64)) {
            let b = LinkBudget::new(10.0 * qq, qq, db_to_linear(db)).unwrap();
            prop_assume!(b.q_p() * hp > b.q_q() * hq);
            let opa = sum_rate(Scheme::Opa, &b, hp, hq);
            prop_assert!(opa >= sum_rate(Scheme::Tdma, &b, hp, hq) - 1e-12);
            if a_range(&b, hp, hq).contains(0.2) {
                let gpa = sum_rate(Scheme::Gpa(GpaConfig::new(0.2).unwrap()), &b, hp, hq);
                prop_assert!(opa >= gpa - 1e-12);
            }
        }

        #[test]
        fn gpa_rate_nondecreasing_over_range((db, hp, hq) in (-10.0..50.0f64, 0.0..20.0f64, 0.0..20.0f64)) {
            let b = LinkBudget::new(1.0, 0.1, db_to_linear(db)).unwrap();
            prop_assume!(b.q_p() * hp > b.q_q() * hq);
            let r = a_range(&b, hp, hq);
            let mut last = f64::NEG_INFINITY;
            for i in 0..=20 {
                let a = r.lower + (r.upper - r.lower) * i as f64 / 20.0;
                let (gp, gq) = sinr_gpa(a, &b, hp, hq);
                let v = (gp.ln_1p() + gq.ln_1p()) / LN_2;
                prop_assert!(v >= last - 1e-12);
                last = v;
            }
        }
    }
}
