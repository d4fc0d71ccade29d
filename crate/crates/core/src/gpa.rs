//! Outage probability and ergodic capacity under a fixed power fraction.

use std::f64::consts::LN_2;

use crate::error::Result;
use crate::ftr::FtrSeries;
use crate::noma::{GpaConfig, LinkBudget};
use crate::specfun::gamma_log_mean;

/// Both users' channels, the link budget and the power fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct GpaScenario {
    pub user_p: FtrSeries,
    pub user_q: FtrSeries,
    pub budget: LinkBudget,
    pub gpa: GpaConfig,
}

impl GpaScenario {
    pub fn new(user_p: FtrSeries, user_q: FtrSeries, budget: LinkBudget, gpa: GpaConfig) -> Self {
        Self {
            user_p,
            user_q,
            budget,
            gpa,
        }
    }

    /// α = 1/(2σ_p²γ̄Q_p).
    pub fn alpha(&self) -> f64 {
        1.0 / (self.user_p.params().diffuse_power() * self.budget.gamma_bar() * self.budget.q_p())
    }

    /// β = 1/(2σ_q²γ̄Q_q).
    pub fn beta(&self) -> f64 {
        1.0 / (self.user_q.params().diffuse_power() * self.budget.gamma_bar() * self.budget.q_q())
    }
}

/// Pr{aγ̄Q_p h_p ≤ γ_th}.
pub fn op_p_gpa(gamma_th: f64, s: &GpaScenario) -> f64 {
    s.user_p
        .cdf(gamma_th / (s.gpa.a() * s.budget.gamma_bar() * s.budget.q_p()))
}

/// Pr{γ_q ≤ γ_th}; identically 1 once a_th = 1 − a − aγ_th ≤ 0.
pub fn op_q_gpa(gamma_th: f64, s: &GpaScenario) -> f64 {
    let a_th = s.gpa.a_th(gamma_th);
    if a_th <= 0.0 {
        return 1.0;
    }
    s.user_q
        .cdf(gamma_th / (a_th * s.budget.gamma_bar() * s.budget.q_q()))
}

/// High-SNR user-p outage, linear in 1/γ̄.
pub fn op_p_gpa_asymptotic(gamma_th: f64, s: &GpaScenario) -> f64 {
    s.user_p
        .cdf_asymptotic(gamma_th / (s.gpa.a() * s.budget.gamma_bar() * s.budget.q_p()))
}

/// High-SNR user-q outage: linear in 1/γ̄ when a_th > 0, else 1.
pub fn op_q_gpa_asymptotic(gamma_th: f64, s: &GpaScenario) -> f64 {
    let a_th = s.gpa.a_th(gamma_th);
    if a_th <= 0.0 {
        return 1.0;
    }
    s.user_q
        .cdf_asymptotic(gamma_th / (a_th * s.budget.gamma_bar() * s.budget.q_q()))
}

/// E[log₂(1 + b·h)] over the series density.
///
/// Each term is (H_j/j!)·∫u^j e^{−u} ln(1 + 2bσ²u) du, the Meijer-G instance of the
/// log kernel; the 1/j! is folded into the Gamma-weighted mean to avoid overflow.
pub fn ec_lambda(b: f64, series: &FtrSeries) -> Result<f64> {
    if !(b > 0.0) {
        return Ok(0.0);
    }
    let y = b * series.params().diffuse_power();
    let mut acc = 0.0;
    for (j, h) in series.h_coeff().iter().enumerate() {
        if *h == 0.0 {
            continue;
        }
        acc += h * gamma_log_mean(j, y)?;
    }
    Ok(acc / LN_2)
}

/// Ergodic sum capacity Λ_p(aγ̄Q_p) + Λ_q(γ̄Q_q) − Λ_q(aγ̄Q_q).
pub fn ec_gpa(s: &GpaScenario) -> Result<f64> {
    let g = s.budget.gamma_bar();
    let a = s.gpa.a();
    let near = ec_lambda(a * g * s.budget.q_p(), &s.user_p)?;
    let far_total = ec_lambda(g * s.budget.q_q(), &s.user_q)?;
    let far_interference = ec_lambda(a * g * s.budget.q_q(), &s.user_q)?;
    Ok((near + far_total - far_interference).max(0.0))
}

/// Ergodic sum rate of the orthogonal baseline: each user gets half the time,
/// ½Λ_p(γ̄Q_p) + ½Λ_q(γ̄Q_q).
pub fn ec_tdma(user_p: &FtrSeries, user_q: &FtrSeries, budget: &LinkBudget) -> Result<f64> {
    let g = budget.gamma_bar();
    Ok(0.5 * (ec_lambda(g * budget.q_p(), user_p)? + ec_lambda(g * budget.q_q(), user_q)?))
}
