use super::FtrParams;
use crate::error::{Error, Result};
use crate::specfun::{i_pow, lgamma, ln_binomial, ln_legendre_neg_order};
use num_complex::Complex64;

/// Above this ratio of Σ|terms| to |Σ terms| the Legendre double sum has lost more
/// than four significant digits to cancellation and the integral form is used.
pub const CANCELLATION_LIMIT: f64 = 1e4;

/// How a coefficient d_j was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffRoute {
    LegendreSum,
    AngularIntegral,
}

/// One coefficient d_j in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffD {
    pub ln_value: f64,
    /// Magnitude of the imaginary part discarded when realizing the complex sum.
    pub imag_residual: f64,
    /// Σ|terms| / |Σ terms| of the Legendre sum (1 for the integral route).
    pub cancellation: f64,
    pub route: CoeffRoute,
}

impl CoeffD {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// d_j of the FTR series, realized from the Legendre double sum when it is well
/// conditioned and from its angular-integral form otherwise.
pub fn coeff_d(j: usize, params: &FtrParams) -> Result<f64> {
    Ok(coeff_d_detailed(j, params)?.value())
}

pub fn coeff_d_detailed(j: usize, params: &FtrParams) -> Result<CoeffD> {
    let legendre = coeff_d_legendre(j, params)?;
    if legendre.cancellation <= CANCELLATION_LIMIT && legendre.ln_value.is_finite() {
        Ok(legendre)
    } else {
        coeff_d_integral(j, params)
    }
}

/// d_j = Σ_k C(j,k)(Δ/2)^k Σ_l C(k,l) Γ(j+m+2l−k) i^{2l−k} P_{j+m−1}^{k−2l}(z) / R^{j+m}
/// with R = √((m+K)²−(KΔ)²), z = (m+K)/R.
///
/// Products Γ(ν+1−μ)P_ν^μ are formed as Γ(ν+|μ|+1)P_ν^{−|μ|} times the phase of
/// P_ν^μ, which stays finite at the poles of Γ for positive orders.
pub fn coeff_d_legendre(j: usize, params: &FtrParams) -> Result<CoeffD> {
    let (m, k, delta) = (params.m(), params.k(), params.delta());
    let r = ((m + k) * (m + k) - (k * delta) * (k * delta)).sqrt();
    let z = (m + k) / r;
    let nu = j as f64 + m - 1.0;
    let ln_r = r.ln();
    let k_max = if delta == 0.0 { 0 } else { j };
    // P_ν^{−M} depends on |k−2l| only
    let mut ln_p = Vec::with_capacity(k_max + 1);
    for order in 0..=k_max {
        let (lp, sign) = ln_legendre_neg_order(nu, order as u32, z)?;
        ln_p.push((lp + lgamma(nu + order as f64 + 1.0), sign));
    }
    let ln_half_delta = (0.5 * delta).ln();
    let mut terms: Vec<(f64, Complex64)> = Vec::with_capacity((k_max + 1) * (k_max + 2) / 2);
    for kk in 0..=k_max {
        let base = ln_binomial(j, kk) + if kk == 0 { 0.0 } else { kk as f64 * ln_half_delta };
        for l in 0..=kk {
            let mu = kk as i32 - 2 * l as i32;
            let (lp, sign) = ln_p[mu.unsigned_abs() as usize];
            if sign == 0.0 {
                continue;
            }
            // i^{2l−k} from the sum times e^{−iπμ/2} of the continued Legendre function
            let phase = i_pow(-mu) * i_pow(-mu) * sign;
            terms.push((base + ln_binomial(kk, l) + lp, phase));
        }
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (ln, phase) in &terms {
        let w = (ln - top).exp();
        sum += phase * w;
        abs_sum += w;
    }
    let scale = top - (j as f64 + m) * ln_r;
    let re = sum.re;
    let cancellation = if re > 0.0 { abs_sum / re } else { f64::INFINITY };
    Ok(CoeffD {
        ln_value: if re > 0.0 { re.ln() + scale } else { f64::NAN },
        imag_residual: sum.im.abs() * scale.exp(),
        cancellation,
        route: CoeffRoute::LegendreSum,
    })
}

/// d_j = Γ(m+j)/π ∫_0^π (1+Δcosθ)^j / (m+K+KΔcosθ)^{m+j} dθ.
///
/// The integrand is smooth and periodic, so the midpoint rule converges
/// geometrically; nodes are doubled until the relative change is below 1e−13.
pub fn coeff_d_integral(j: usize, params: &FtrParams) -> Result<CoeffD> {
    let (m, k, delta) = (params.m(), params.k(), params.delta());
    let jf = j as f64;
    let ln_f = |theta: f64| {
        let c = theta.cos();
        let num = if j == 0 { 0.0 } else { jf * (delta * c).ln_1p() };
        num - (m + jf) * (m + k + k * delta * c).ln()
    };
    let midpoint = |n: usize| {
        let h = std::f64::consts::PI / n as f64;
        let logs: Vec<f64> = (0..n).map(|i| ln_f((i as f64 + 0.5) * h)).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        top + (sum / n as f64).ln()
    };
    let mut n = 64;
    let mut prev = midpoint(n);
    loop {
        n *= 2;
        let cur = midpoint(n);
        if (cur - prev).abs() < 1e-13 {
            return Ok(CoeffD {
                ln_value: cur + lgamma(m + jf),
                imag_residual: 0.0,
                cancellation: 1.0,
                route: CoeffRoute::AngularIntegral,
            });
        }
        if n >= 1 << 16 {
            return Err(Error::NonConvergence {
                what: "FTR coefficient integral",
                detail: format!("j = {j}: change {:.3e} at {n} nodes", (cur - prev).abs()),
            });
        }
        prev = cur;
    }
}
