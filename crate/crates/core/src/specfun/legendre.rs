use num_complex::Complex64;

use super::gamma::{lgamma, ln_factorial};
use crate::error::{domain, Error, Result};

const SERIES_TOL: f64 = 1e-14;
const SERIES_CAP: usize = 10_000;

/// Real Gauss hypergeometric series ₂F₁(a, b; c; x) for |x| < 1.
///
/// `c` must not be a non-positive integer. Terminates early when `a` or `b` is a
/// non-positive integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(domain("hyp2f1", format!("series argument {x} outside the unit disc")));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(domain("hyp2f1", format!("c = {c} is a pole")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        if term == 0.0 {
            return Ok(sum);
        }
        // Kahan
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() <= SERIES_TOL * sum.abs() && nf > (-a).max(-b) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "hypergeometric series",
        detail: format!("2F1({a}, {b}; {c}; {x}) after {SERIES_CAP} terms"),
    })
}

/// ln of the real-axis Legendre function P_ν^{−M}(z) for z ≥ 1, M ≥ 0 (Ferrers-free, "type 3"
/// normalization), together with its sign.
///
/// Uses the Pfaff-transformed series
/// P_ν^{−M}(z) = ((z−1)/(z+1))^{M/2} ((1+z)/2)^ν ₂F₁(−ν, M−ν; 1+M; (z−1)/(z+1)) / M!,
/// whose argument stays in [0, 1) for every z ≥ 1.
pub(crate) fn ln_legendre_neg_order(nu: f64, order: u32, z: f64) -> Result<(f64, f64)> {
    let m = order as f64;
    let w = (z - 1.0) / (z + 1.0);
    let f = hyp2f1(-nu, m - nu, 1.0 + m, w)?;
    if f == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    let ln_pow = if order == 0 { 0.0 } else { 0.5 * m * w.ln() };
    let ln = ln_pow + nu * (0.5 * (1.0 + z)).ln() + f.abs().ln() - ln_factorial(order as usize);
    Ok((ln, f.signum()))
}

/// First-kind Legendre function P_ν^μ(z) on z ≥ 1 for integer order μ.
///
/// The value is the analytic continuation of the Ferrers function to z > 1 across
/// the upper half plane, P_ν^μ(z) = e^{−iπμ/2} · ((z+1)/(z−1))^{μ/2}
/// ₂F₁(−ν, ν+1; 1−μ; (1−z)/2) / Γ(1−μ). Positive orders come from
/// P_ν^{M} = Γ(ν+M+1)/Γ(ν−M+1) · P_ν^{−M}, which is the limiting form at the poles of
/// Γ(1−μ) and vanishes when ν − M + 1 is a non-positive integer.
pub fn legendre_p(degree: f64, order: i32, arg: f64) -> Result<Complex64> {
    if !(arg >= 1.0) || !arg.is_finite() {
        return Err(domain("legendre_p", format!("arg = {arg}, need arg >= 1")));
    }
    if !degree.is_finite() {
        return Err(domain("legendre_p", "non-finite degree"));
    }
    let m = order.unsigned_abs();
    let mf = m as f64;
    let phase = i_pow(-order);
    if arg == 1.0 {
        // ((z+1)/(z−1))^{μ/2} is singular; only μ ≤ 0 has a finite limit
        return Ok(match order {
            0 => Complex64::new(1.0, 0.0),
            o if o < 0 => Complex64::new(0.0, 0.0),
            _ => {
                return Err(domain(
                    "legendre_p",
                    "positive order is singular at arg = 1",
                ))
            }
        });
    }
    let (ln_base, sign) = ln_legendre_neg_order(degree, m, arg)?;
    let value = if order <= 0 {
        sign * ln_base.exp()
    } else {
        let lower = degree - mf + 1.0;
        if lower <= 0.0 && lower.fract() == 0.0 {
            0.0
        } else {
            let (lg_low, sg_low) = libm::lgamma_r(lower);
            let ratio = lgamma(degree + mf + 1.0) - lg_low;
            sign * f64::from(sg_low) * (ratio + ln_base).exp()
        }
    };
    Ok(phase * value)
}

/// iⁿ for integer n, exact.
pub(crate) fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
