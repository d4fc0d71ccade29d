//! Outage probability and ergodic capacity under the sum-rate optimal power split.

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Error, Result};
use crate::ftr::FtrSeries;
use crate::noma::LinkBudget;
use crate::specfun::{
    chebyshev_gauss_rule, digamma, gamma_log_mean, kummer_u_scaled, ln_double_factorial, ln_factorial,
    ln_gaussian_moment_table, log_add,
};
use crate::specfun::quadrature::{integrate_to_infinity, Tolerance};

/// Default Chebyshev-Gauss node counts for the user-p outage and capacity integrals.
pub const DEFAULT_NODES: usize = 64;
/// Largest node count the doubling loop may reach.
pub const MAX_NODES: usize = 1024;
/// Doubling stops once a result moves by less than this (absolute).
pub const STABILITY_TOL: f64 = 1e-6;

/// Both users' channels and the link budget, plus quadrature node counts.
#[derive(Debug, Clone, PartialEq)]
pub struct OpaScenario {
    pub user_p: FtrSeries,
    pub user_q: FtrSeries,
    pub budget: LinkBudget,
    pub quad_op_nodes: usize,
    pub quad_ec_nodes: usize,
}

impl OpaScenario {
    pub fn new(user_p: FtrSeries, user_q: FtrSeries, budget: LinkBudget) -> Self {
        Self {
            user_p,
            user_q,
            budget,
            quad_op_nodes: DEFAULT_NODES,
            quad_ec_nodes: DEFAULT_NODES,
        }
    }

    pub fn with_nodes(mut self, op_nodes: usize, ec_nodes: usize) -> Result<Self> {
        for (name, n) in [("quad_op_nodes", op_nodes), ("quad_ec_nodes", ec_nodes)] {
            if !(8..=MAX_NODES).contains(&n) {
                return Err(invalid(name, format!("{n}; must lie in [8, {MAX_NODES}]")));
            }
        }
        self.quad_op_nodes = op_nodes;
        self.quad_ec_nodes = ec_nodes;
        Ok(self)
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

fn ln_tail_sums(series: &FtrSeries) -> Vec<f64> {
    let h = series.h_coeff();
    let mut out = vec![0.0; h.len()];
    let mut acc = 0.0;
    for j in (0..h.len()).rev() {
        acc += h[j];
        out[j] = acc.ln();
    }
    out
}

fn sum_scaled(logs: &[f64]) -> (f64, f64) {
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    (top, logs.iter().map(|l| (l - top).exp()).sum())
}

/// Pr{γ̄Q_p h_p/(√(1+γ̄Q_q h_q)+1) ≤ γ_th}.
///
/// Shifting the far-user variable to w = √(1+γ̄Q_q h_q) − 1 turns every term of the
/// double series into a positive combination of ∫_0^∞ w^ν e^{−(q+2β)w−βw²} dw
/// (q = αγ_th), so no alternating sums occur. The leading 1 of the outage expression
/// is taken as the product of the two truncated series masses, which makes the
/// result the exact expectation of the truncated CDFs.
pub fn op_p_opa(gamma_th: f64, s: &OpaScenario) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Ok(0.0);
    }
    let q = gamma_th * s.alpha();
    let beta = s.beta();
    let np = s.user_p.n_terms();
    let nq = s.user_q.n_terms();
    let tails = ln_tail_sums(&s.user_p);
    let ln_hq = s.user_q.ln_h();
    let nu_max = 2 * (nq - 1) + (np - 1) + 1;
    let table = ln_gaussian_moment_table(q + 2.0 * beta, beta, nu_max)?;
    let (ln_q, ln_beta) = (q.ln(), beta.ln());
    let mut outer = Vec::with_capacity(np * nq);
    let mut inner = Vec::with_capacity(np + 2 * nq + 2);
    for n_p in 0..np {
        let head = tails[n_p] + n_p as f64 * ln_q - ln_factorial(n_p);
        if head == f64::NEG_INFINITY {
            continue;
        }
        for j_q in 0..nq {
            if ln_hq[j_q] == f64::NEG_INFINITY {
                continue;
            }
            // (w+2)^N (w+1) = Σ_r c_r w^r with c_r = C(N,r)2^{N−r} + C(N,r−1)2^{N−r+1}
            let n = n_p + j_q;
            inner.clear();
            for r in 0..=n + 1 {
                let mut ln_c = f64::NEG_INFINITY;
                if r <= n {
                    ln_c = ln_binom(n, r) + (n - r) as f64 * LN_2;
                }
                if r >= 1 {
                    ln_c = log_add(ln_c, ln_binom(n, r - 1) + (n + 1 - r) as f64 * LN_2);
                }
                inner.push(ln_c + table[j_q + r]);
            }
            let (top, sum) = sum_scaled(&inner);
            let ln_j = top + sum.ln();
            outer.push(head + ln_hq[j_q] + (j_q as f64 + 1.0) * ln_beta - ln_factorial(j_q) + ln_j);
        }
    }
    let (top, sum) = sum_scaled(&outer);
    let survival = (LN_2 - 2.0 * q + top + sum.ln()).exp();
    let mass = s.user_p.normalization() * s.user_q.normalization();
    Ok((mass - survival).clamp(0.0, 1.0))
}

#[inline]
fn ln_binom(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// User-p outage through the binomial expansion of (z−1)^{j_q}(z+1)^{n_p+j_q} with
/// ∫_1^∞ = ∫_0^∞ − ∫_0^1, the first by the parabolic-cylinder identity and the second
/// by Chebyshev-Gauss quadrature with `nodes` nodes.
///
/// The expansion alternates in sign and cancels heavily when β is large (low SNR);
/// it is reliable only at high SNR and is kept to audit [`op_p_opa`].
pub fn op_p_opa_expanded(gamma_th: f64, s: &OpaScenario, nodes: usize) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Ok(0.0);
    }
    let q = gamma_th * s.alpha();
    let beta = s.beta();
    let np = s.user_p.n_terms();
    let nq = s.user_q.n_terms();
    let nu_max = 2 * (nq - 1) + (np - 1) + 1;
    let ln_i6 = ln_gaussian_moment_table(q, beta, nu_max)?;
    let rule = chebyshev_gauss_rule(nodes);
    // ln I7[ν] = −(ν+1)ln2 − q/2 − β/4 + ln Σ_k (π/I)√(1−φ²)(1+φ)^ν e^{−(q+β)φ/2−βφ²/4}
    let node_logs: Vec<(f64, f64)> = rule
        .nodes()
        .iter()
        .map(|&phi| {
            let base = (PI / nodes as f64 * (1.0 - phi * phi).sqrt()).ln() - 0.5 * (q + beta) * phi - 0.25 * beta * phi * phi;
            (base, (1.0 + phi).ln())
        })
        .collect();
    let mut ln_i5 = vec![f64::NEG_INFINITY; nu_max + 1];
    let mut buf = Vec::with_capacity(nodes);
    for nu in 1..=nu_max {
        buf.clear();
        buf.extend(node_logs.iter().map(|(b, l)| b + nu as f64 * l));
        let (top, sum) = sum_scaled(&buf);
        let ln_i7 = top + sum.ln() - (nu as f64 + 1.0) * LN_2 - 0.5 * q - 0.25 * beta;
        let gap = ln_i7 - ln_i6[nu];
        // I7 ≤ I6 in exact arithmetic; quadrature error can cross it
        ln_i5[nu] = if gap < 0.0 { ln_i6[nu] + (-gap.exp_m1()).ln() } else { f64::NEG_INFINITY };
    }
    let tails = ln_tail_sums(&s.user_p);
    let ln_hq = s.user_q.ln_h();
    let (ln_q, ln_beta) = (q.ln(), beta.ln());
    let mut outer: Vec<(f64, f64)> = Vec::with_capacity(np * nq);
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for n_p in 0..np {
        let head = tails[n_p] + n_p as f64 * ln_q - ln_factorial(n_p);
        if head == f64::NEG_INFINITY {
            continue;
        }
        for j_q in 0..nq {
            if ln_hq[j_q] == f64::NEG_INFINITY {
                continue;
            }
            let big = n_p + j_q;
            terms.clear();
            for n in 0..=j_q {
                let sign = if (j_q - n) % 2 == 0 { 1.0 } else { -1.0 };
                let ln_a = ln_binom(j_q, n);
                for m in 0..=big {
                    terms.push((ln_a + ln_binom(big, m) + ln_i5[m + n + 1], sign));
                }
            }
            let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                continue;
            }
            let i4 = neumaier(terms.iter().map(|(l, sg)| sg * (l - top).exp()));
            if i4 == 0.0 {
                continue;
            }
            let ln_abs = head + ln_hq[j_q] + (j_q as f64 + 1.0) * ln_beta - ln_factorial(j_q) + top + i4.abs().ln();
            outer.push((ln_abs, i4.signum()));
        }
    }
    let top = outer.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let sum = neumaier(outer.iter().map(|(l, sg)| sg * (l - top).exp()));
    let survival = if sum == 0.0 {
        0.0
    } else {
        sum.signum() * (LN_2 - q + beta + top + sum.abs().ln()).exp()
    };
    let mass = s.user_p.normalization() * s.user_q.normalization();
    Ok((mass - survival).clamp(0.0, 1.0))
}

/// [`op_p_opa_expanded`] with node doubling from `s.quad_op_nodes` until the value
/// moves by less than [`STABILITY_TOL`].
pub fn op_p_opa_expanded_converged(gamma_th: f64, s: &OpaScenario) -> Result<(f64, usize)> {
    let mut nodes = s.quad_op_nodes;
    let mut prev = op_p_opa_expanded(gamma_th, s, nodes)?;
    while nodes < MAX_NODES {
        nodes *= 2;
        let cur = op_p_opa_expanded(gamma_th, s, nodes)?;
        if (cur - prev).abs() < STABILITY_TOL {
            return Ok((cur, nodes));
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "user-p outage quadrature",
        detail: format!("no stable value within {MAX_NODES} nodes"),
    })
}

fn neumaier<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// User-p outage conditioned on the far user's gain: F_p(γ_th(√(1+γ̄Q_q h_q)+1)/(γ̄Q_p)).
pub fn op_p_opa_given_hq(gamma_th: f64, h_q: f64, s: &OpaScenario) -> f64 {
    let g = s.budget.gamma_bar();
    s.user_p
        .cdf(gamma_th * ((1.0 + g * s.budget.q_q() * h_q).sqrt() + 1.0) / (g * s.budget.q_p()))
}

/// User-p outage by adaptive quadrature of [`op_p_opa_given_hq`] against the far-user
/// density; an independent reference for [`op_p_opa`].
pub fn op_p_opa_integral(gamma_th: f64, s: &OpaScenario) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Ok(0.0);
    }
    let scale = s.user_q.params().mean_power();
    let breaks: Vec<f64> = [0.0, 0.01, 0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0, 5.0].iter().map(|b| b * scale).collect();
    let v = integrate_to_infinity(
        |y| op_p_opa_given_hq(gamma_th, y, s) * s.user_q.pdf(y),
        &breaks,
        Tolerance::tight(),
    )?;
    Ok(v.value.clamp(0.0, 1.0))
}

/// Pr{√(1+γ̄Q_q h_q) − 1 ≤ γ_th} = F_q((γ_th² + 2γ_th)/(γ̄Q_q)).
pub fn op_q_opa(gamma_th: f64, s: &OpaScenario) -> f64 {
    s.user_q
        .cdf((gamma_th * gamma_th + 2.0 * gamma_th) / (s.budget.gamma_bar() * s.budget.q_q()))
}

/// High-SNR user-p outage, proportional to γ̄^{−1/2}.
pub fn op_p_opa_asymptotic(gamma_th: f64, s: &OpaScenario) -> f64 {
    let p = s.user_p.params();
    let q = s.user_q.params();
    let mut acc = 0.0;
    for (j, lh) in s.user_q.ln_h().iter().enumerate() {
        let ln_df = ln_double_factorial(2 * j as i64 + 1).expect("odd argument");
        acc += (ln_df + lh - (j as f64 + 1.0) * LN_2 - ln_factorial(j)).exp();
    }
    let sq2 = q.sigma() * q.sigma();
    let sp2 = p.sigma() * p.sigma();
    s.user_p.h_coeff()[0] * gamma_th * (sq2 * s.budget.q_q() * PI).sqrt() / (sp2 * s.budget.q_p() * 2f64.sqrt()) * acc
        / s.budget.gamma_bar().sqrt()
}

/// High-SNR user-q outage, proportional to γ̄^{−1}.
pub fn op_q_opa_asymptotic(gamma_th: f64, s: &OpaScenario) -> f64 {
    s.user_q
        .cdf_asymptotic((gamma_th * gamma_th + 2.0 * gamma_th) / (s.budget.gamma_bar() * s.budget.q_q()))
}

/// Pieces of the OPA capacity expressions, in bits/s/Hz where applicable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaCapacityTerms {
    /// E[I₁₀] = E[γ̄Q_p h_p] + E[√(1+γ̄Q_q h_q)].
    pub mean_i10: f64,
    /// E[I₁₀²].
    pub second_moment_i10: f64,
    /// Second-order Taylor estimate of E[log₂(1 + I₁₀)].
    pub i8_approx: f64,
    pub i8_lower: f64,
    pub i8_upper: f64,
    /// E[log₂(1 + 1/√(1+γ̄Q_q h_q))].
    pub i9: f64,
    /// Chebyshev-Gauss nodes used for I₉.
    pub i9_nodes: usize,
}

impl OpaCapacityTerms {
    pub fn approx(&self) -> f64 {
        (self.i8_approx - self.i9).max(0.0)
    }

    pub fn lower(&self) -> f64 {
        (self.i8_lower - self.i9).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.i8_upper - self.i9).max(0.0)
    }
}

/// E[√(1+γ̄Q_q h_q)] = Σ_j H_j β^{j+1} Ψ(j+1, j+2.5; β).
pub fn mean_sqrt_far(s: &OpaScenario) -> Result<f64> {
    let beta = s.beta();
    let mut acc = 0.0;
    for (j, h) in s.user_q.h_coeff().iter().enumerate() {
        if *h == 0.0 {
            continue;
        }
        let a = j as f64 + 1.0;
        acc += h * kummer_u_scaled(a, a + 1.5, beta)?;
    }
    Ok(acc)
}

/// I₉ by Chebyshev-Gauss quadrature with `nodes` nodes after t = (1+γ̄Q_q y)^{−1/2}.
pub fn i9_chebyshev(s: &OpaScenario, nodes: usize) -> f64 {
    let beta = s.beta();
    let rule = chebyshev_gauss_rule(nodes);
    let mut logs = Vec::with_capacity(nodes * s.user_q.n_terms());
    for &phi in rule.nodes() {
        let one_p = 1.0 + phi;
        let weight = ((1.0 - phi * phi).sqrt() * (0.5 * (phi + 3.0)).ln()).ln();
        let ex = beta - 4.0 * beta / (one_p * one_p);
        let ln_mid = ((phi + 3.0) * (1.0 - phi)).ln();
        let ln_one_p = one_p.ln();
        for (j, lh) in s.user_q.ln_h().iter().enumerate() {
            let jf = j as f64;
            logs.push(lh + (jf + 1.0) * beta.ln() - ln_factorial(j) + ex + jf * ln_mid - (2.0 * jf + 3.0) * ln_one_p + weight);
        }
    }
    let (top, sum) = sum_scaled(&logs);
    8.0 / LN_2 * PI / nodes as f64 * (top.exp() * sum)
}

/// I₉ with node doubling from `s.quad_ec_nodes`.
///
/// The j = 0 integrand does not vanish at φ = 1, so the plain rule converges only as
/// J⁻². Each estimate is therefore the Richardson combination (4·I(2J) − I(J))/3,
/// and doubling continues until successive combinations agree to [`STABILITY_TOL`].
/// Returns the value and the largest node count evaluated.
pub fn i9_converged(s: &OpaScenario) -> Result<(f64, usize)> {
    let mut nodes = s.quad_ec_nodes;
    let mut coarse = i9_chebyshev(s, nodes);
    let mut fine = i9_chebyshev(s, 2 * nodes);
    let mut prev = (4.0 * fine - coarse) / 3.0;
    while 4 * nodes <= MAX_NODES {
        nodes *= 2;
        coarse = fine;
        fine = i9_chebyshev(s, 2 * nodes);
        let cur = (4.0 * fine - coarse) / 3.0;
        if (cur - prev).abs() < STABILITY_TOL {
            return Ok((cur, 2 * nodes));
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "capacity quadrature",
        detail: format!("I9 not stable within {MAX_NODES} nodes"),
    })
}

/// All OPA capacity pieces in one pass.
pub fn ec_opa_terms(s: &OpaScenario) -> Result<OpaCapacityTerms> {
    let alpha = s.alpha();
    let beta = s.beta();
    let hp = s.user_p.h_coeff();
    let hq = s.user_q.h_coeff();
    let w = mean_sqrt_far(s)?;
    let l_p = hp.iter().enumerate().map(|(j, h)| h * (j as f64 + 1.0)).sum::<f64>() / alpha;
    let l_q = hq.iter().enumerate().map(|(j, h)| h * (j as f64 + 1.0)).sum::<f64>() / beta;
    let second_p = hp
        .iter()
        .enumerate()
        .map(|(j, h)| h * (j as f64 + 1.0) * (j as f64 + 2.0))
        .sum::<f64>()
        / (alpha * alpha);
    let mean = w + l_p;
    let second = second_p + 1.0 + l_q + 2.0 * l_p * w;
    let var = second - mean * mean;
    let i8_approx = mean.ln_1p() / LN_2 - var / (2.0 * LN_2 * (1.0 + mean).powi(2));
    let i8_upper = mean.ln_1p() / LN_2;

    let mut half_ln_far = 0.0;
    for (j, h) in hq.iter().enumerate() {
        if *h != 0.0 {
            half_ln_far += h * gamma_log_mean(j, 1.0 / beta)?;
        }
    }
    half_ln_far *= 0.5;
    let mut ln_near = -alpha.ln();
    for (j, h) in hp.iter().enumerate() {
        if *h != 0.0 {
            ln_near += h * digamma(j as f64 + 1.0)?;
        }
    }
    let i8_lower = (1.0 + half_ln_far.exp() + ln_near.exp()).ln() / LN_2;
    let (i9, i9_nodes) = i9_converged(s)?;
    Ok(OpaCapacityTerms {
        mean_i10: mean,
        second_moment_i10: second,
        i8_approx,
        i8_lower,
        i8_upper,
        i9,
        i9_nodes,
    })
}

/// Taylor-approximated ergodic sum capacity.
pub fn ec_opa_approx(s: &OpaScenario) -> Result<f64> {
    Ok(ec_opa_terms(s)?.approx())
}

/// Jensen lower bound on the ergodic sum capacity.
pub fn ec_opa_lower(s: &OpaScenario) -> Result<f64> {
    Ok(ec_opa_terms(s)?.lower())
}

/// Jensen upper bound on the ergodic sum capacity.
pub fn ec_opa_upper(s: &OpaScenario) -> Result<f64> {
    Ok(ec_opa_terms(s)?.upper())
}
