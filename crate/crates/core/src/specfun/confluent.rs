use super::gamma::{lgamma, ln_factorial};
use super::quadrature::{gamma_bulk_breaks, integrate_to_infinity, Tolerance};
use crate::error::{domain, Result};

/// Tricomi confluent hypergeometric function Ψ(a, b; z) = U(a, b, z).
pub fn kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    let scaled = kummer_u_scaled(a, b, z)?;
    Ok(scaled * (-a * z.ln()).exp())
}

/// z^a · Ψ(a, b; z), which stays O(1) where Ψ itself overflows or underflows.
///
/// Evaluated as (1/Γ(a)) ∫_0^∞ e^{−s} s^{a−1} (1 + s/z)^{b−a−1} ds.
pub fn kummer_u_scaled(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) || !b.is_finite() || !z.is_finite() {
        return Err(domain(
            "kummer_u",
            format!("a = {a}, b = {b}, z = {z}; need a > 0 and z > 0"),
        ));
    }
    let c = b - a - 1.0;
    let lg = lgamma(a);
    let mut breaks = gamma_bulk_breaks(a);
    breaks.extend([z, 10.0 * z].iter().filter(|v| v.is_finite() && **v < 1e6));
    if a >= 1.0 {
        let f = |s: f64| {
            if s <= 0.0 {
                return if a == 1.0 { (-lg).exp() } else { 0.0 };
            }
            ((a - 1.0) * s.ln() - s + c * (s / z).ln_1p() - lg).exp()
        };
        Ok(integrate_to_infinity(f, &breaks, Tolerance::tight())?.value)
    } else {
        // s = v^{1/a} absorbs the integrable singularity at the origin
        let inv = 1.0 / a;
        let f = |v: f64| {
            if v <= 0.0 {
                return (-lg).exp() * inv;
            }
            let s = v.powf(inv);
            (-s + c * (s / z).ln_1p() - lg).exp() * inv
        };
        let vb: Vec<f64> = breaks.iter().map(|s| s.powf(a)).collect();
        Ok(integrate_to_infinity(f, &vb, Tolerance::tight())?.value)
    }
}

/// E[ln(1 + y·U)] for U ~ Gamma(j+1, 1), i.e. (1/j!) ∫_0^∞ u^j e^{−u} ln(1+yu) du.
pub fn gamma_log_mean(j: usize, y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain("meijer_g_log", format!("y = {y}, need y >= 0")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let jf = j as f64;
    let lf = ln_factorial(j);
    let f = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        (jf * u.ln() - u - lf).exp() * (y * u).ln_1p()
    };
    Ok(integrate_to_infinity(f, &gamma_bulk_breaks(jf + 1.0), Tolerance::tight())?.value)
}

/// The Meijer-G instance G¹³₃₂(y | −j, 1, 1; 1, 0) = ∫_0^∞ u^j e^{−u} ln(1+yu) du.
pub fn meijer_g_log(j: usize, y: f64) -> Result<f64> {
    Ok(gamma_log_mean(j, y)? * ln_factorial(j).exp())
}

/// Parabolic-cylinder function D_order(arg) for order ≤ 0 and arg ≥ 0.
///
/// For order = −ν−1 uses D_{−ν−1}(x) = e^{−x²/4}/Γ(ν+1) · ∫_0^∞ t^ν e^{−xt−t²/2} dt.
pub fn parabolic_cylinder_d(order: f64, arg: f64) -> Result<f64> {
    if !(order <= 0.0) || !(arg >= 0.0) || !arg.is_finite() {
        return Err(domain(
            "parabolic_cylinder_d",
            format!("order = {order}, arg = {arg}; need order <= 0 and arg >= 0"),
        ));
    }
    if order == 0.0 {
        return Ok((-0.25 * arg * arg).exp());
    }
    let nu = -order - 1.0;
    let ln_s = ln_gaussian_moment(nu, arg, 0.5)?;
    Ok((-0.25 * arg * arg - lgamma(nu + 1.0) + ln_s).exp())
}

/// ln ∫_0^∞ w^ν e^{−qw−βw²} dw for ν > −1, q ≥ 0, β > 0.
pub fn ln_gaussian_moment(nu: f64, q: f64, beta: f64) -> Result<f64> {
    if !(nu > -1.0) || !(q >= 0.0) || !(beta > 0.0) {
        return Err(domain(
            "ln_gaussian_moment",
            format!("nu = {nu}, q = {q}, beta = {beta}"),
        ));
    }
    if nu < 0.0 {
        // w = v^{1/(ν+1)}: w^ν dw = dv/(ν+1)
        let p = 1.0 / (nu + 1.0);
        let f = |v: f64| {
            let w = v.powf(p);
            (-q * w - beta * w * w).exp() * p
        };
        let scale = if q > 0.0 { (1.0 / q).min(beta.sqrt().recip()) } else { beta.sqrt().recip() };
        let breaks: Vec<f64> = [0.0, 0.1 * scale, scale, 4.0 * scale]
            .iter()
            .map(|w: &f64| w.powf(nu + 1.0))
            .collect();
        return Ok(integrate_to_infinity(f, &breaks, Tolerance::tight())?.value.ln());
    }
    let peak = if nu == 0.0 {
        0.0
    } else {
        (-q + (q * q + 8.0 * beta * nu).sqrt()) / (4.0 * beta)
    };
    let phi = |w: f64| {
        let lw = if nu == 0.0 { 0.0 } else { nu * w.ln() };
        lw - q * w - beta * w * w
    };
    let top = phi(peak);
    // curvature of φ at the peak sets the width of the integrand's bulk
    let curv = if peak > 0.0 { nu / (peak * peak) + 2.0 * beta } else { 2.0 * beta };
    let width = {
        let gauss = curv.sqrt().recip();
        if q > 0.0 && peak == 0.0 {
            gauss.min(1.0 / q)
        } else {
            gauss
        }
    };
    let mut breaks = vec![0.0];
    for k in [-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0, 24.0] {
        let w = peak + k * width;
        if w > 0.0 {
            breaks.push(w);
        }
    }
    let f = |w: f64| {
        if w <= 0.0 {
            return if nu == 0.0 { (-top).exp() } else { 0.0 };
        }
        (phi(w) - top).exp()
    };
    let v = integrate_to_infinity(f, &breaks, Tolerance::tight())?.value;
    Ok(v.ln() + top)
}

/// ln T_ν for ν = 0..=nu_max, with T_ν = ∫_0^∞ w^ν e^{−qw−βw²} dw.
///
/// Seeds the top two entries by quadrature and fills the rest by the downward
/// recurrence T_{ν−1} = (q T_ν + 2β T_{ν+1})/ν, which only adds positive terms.
pub fn ln_gaussian_moment_table(q: f64, beta: f64, nu_max: usize) -> Result<Vec<f64>> {
    let top = nu_max + 1;
    let mut table = vec![0.0; top + 1];
    table[top] = ln_gaussian_moment(top as f64, q, beta)?;
    table[top - 1] = ln_gaussian_moment((top - 1) as f64, q, beta)?;
    let ln_q = q.ln();
    let ln_2b = (2.0 * beta).ln();
    for nu in (1..top).rev() {
        let a = ln_q + table[nu];
        let b = ln_2b + table[nu + 1];
        table[nu - 1] = log_add(a, b) - (nu as f64).ln();
    }
    table.truncate(nu_max + 1);
    Ok(table)
}

/// D_{−1}, D_{−2}, …, D_{−n} at x by the upward three-term recurrence from the erfc seed.
///
/// Loses accuracy for large x·n; kept as an independent cross-check of the quadrature path.
pub fn parabolic_cylinder_d_upward(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let d0 = (-0.25 * x * x).exp();
    let d1 = (std::f64::consts::PI / 2.0).sqrt() * (0.25 * x * x).exp() * libm::erfc(x / std::f64::consts::SQRT_2);
    let (mut prev, mut cur) = (d0, d1);
    for k in 1..=n {
        out.push(cur);
        // D_{−k−1} = (D_{−k+1} − x D_{−k}) / k
        let next = (prev - x * cur) / k as f64;
        prev = cur;
        cur = next;
    }
    out
}

#[inline]
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::gauss_laguerre_rule;
    use approx::assert_relative_eq;

    const E_E1_1: f64 = 0.596_347_362_323_194_074_34;

    #[test]
    fn kummer_reference_values() {
        assert_relative_eq!(kummer_u(1.0, 1.0, 1.0).unwrap(), E_E1_1, max_relative = 1e-10);
        assert_relative_eq!(kummer_u(1.0, 2.5, 0.5).unwrap(), 3.311_359_084_837_596_943_1, max_relative = 1e-10);
        assert_relative_eq!(kummer_u(3.0, 4.5, 2.0).unwrap(), 0.194_918_629_726_690_479, max_relative = 1e-10);
        let big = kummer_u(2.0, 3.5, 1e6).unwrap() * 1e12;
        assert!((0.99..=1.01).contains(&big));
        assert_relative_eq!(kummer_u_scaled(2.0, 3.5, 1e6).unwrap(), 1.000_000_999_999_250_001_5, max_relative = 1e-10);
        assert_relative_eq!(kummer_u_scaled(80.0, 81.5, 0.01).unwrap(), 89.308_691_252_686_866_342, max_relative = 1e-10);
        // a < 1 path: U(1/2, 1/2, z) = √π e^z erfc(√z)
        let z: f64 = 0.7;
        let exact = std::f64::consts::PI.sqrt() * z.exp() * libm::erfc(z.sqrt());
        assert_relative_eq!(kummer_u(0.5, 0.5, z).unwrap(), exact, max_relative = 1e-9);
        assert!(kummer_u(0.0, 1.0, 1.0).is_err());
        assert!(kummer_u(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn kummer_decreases_in_z() {
        for (a, b) in [(1.0, 2.5), (3.0, 4.5), (0.5, 2.0), (10.0, 11.5)] {
            let mut last = f64::INFINITY;
            for k in 0..30 {
                let z = 0.05 * 1.4f64.powi(k);
                let v = kummer_u(a, b, z).unwrap();
                assert!(v < last, "a={a} b={b} z={z}");
                last = v;
            }
        }
    }

    #[test]
    fn meijer_log_values() {
        assert_eq!(meijer_g_log(0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(meijer_g_log(0, 1.0).unwrap(), E_E1_1, max_relative = 1e-10);
        assert_relative_eq!(meijer_g_log(3, 2.5).unwrap(), 13.768_077_281_959_321_834, max_relative = 1e-10);
        assert_relative_eq!(gamma_log_mean(40, 1e-3).unwrap(), 0.040_162_895_735_657_033_368, max_relative = 1e-10);
    }

    #[test]
    fn meijer_log_matches_gauss_laguerre() {
        let rule = gauss_laguerre_rule(256, 0.0).unwrap();
        for (j, y) in [(3usize, 2.5), (0, 0.3), (7, 11.0)] {
            let gl = rule.apply(|u| u.powi(j as i32) * (y * u).ln_1p());
            assert_relative_eq!(meijer_g_log(j, y).unwrap(), gl, max_relative = 1e-9);
        }
    }

    #[test]
    fn meijer_log_monotone() {
        for j in 0..12 {
            let mut last = 0.0;
            for k in 1..25 {
                let y = 0.01 * 1.6f64.powi(k);
                let v = meijer_g_log(j, y).unwrap();
                assert!(v > last);
                assert!(meijer_g_log(j + 1, y).unwrap() >= v);
                last = v;
            }
        }
    }

    #[test]
    fn parabolic_reference_values() {
        assert_relative_eq!(parabolic_cylinder_d(-1.0, 0.0).unwrap(), 1.253_314_137_315_500_251_2, max_relative = 1e-12);
        assert_relative_eq!(parabolic_cylinder_d(-2.0, 0.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(parabolic_cylinder_d(-3.0, 1.2).unwrap(), 0.085_772_798_477_853_229_94, max_relative = 1e-11);
        assert_relative_eq!(parabolic_cylinder_d(-1.0, 3.0).unwrap(), 0.032_103_581_293_111_514_506, max_relative = 1e-11);
        assert_relative_eq!(parabolic_cylinder_d(-41.0, 2.5).unwrap(), 5.410_261_699_868_071_217_4e-32, max_relative = 1e-10);
        assert_relative_eq!(parabolic_cylinder_d(-200.0, 15.0).unwrap(), 9.533_208_713_229_598_410_3e-284, max_relative = 1e-9);
        assert_relative_eq!(parabolic_cylinder_d(0.0, 2.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(parabolic_cylinder_d(0.5, 1.0).is_err());
        assert!(parabolic_cylinder_d(-1.0, -1.0).is_err());
    }

    #[test]
    fn parabolic_recurrence_cross_check() {
        for x in [0.0, 0.3, 1.2, 2.0] {
            let up = parabolic_cylinder_d_upward(8, x);
            for (k, v) in up.iter().enumerate() {
                let q = parabolic_cylinder_d(-(k as f64) - 1.0, x).unwrap();
                assert_relative_eq!(q, *v, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn parabolic_matches_laguerre_oracle() {
        // ∫ e^{−qz−βz²} z² dz by Gauss-Laguerre in u = q z (β small relative to q)
        let (q, beta) = (2.0f64, 0.35f64);
        let rule = gauss_laguerre_rule(128, 2.0).unwrap();
        let lhs = rule.apply(|u| (-beta * u * u / (q * q)).exp()) / q.powi(3);
        let x = q / (2.0 * beta).sqrt();
        let rhs = 2.0 * (2.0 * beta).powf(-1.5) * (q * q / (8.0 * beta)).exp() * parabolic_cylinder_d(-3.0, x).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
    }

    #[test]
    fn moment_table_matches_direct() {
        for (q, beta) in [(0.0, 1.0), (0.3, 2.0), (4.0, 0.01), (0.05, 30.0), (20.0, 1e-4)] {
            let table = ln_gaussian_moment_table(q, beta, 60).unwrap();
            for nu in [0usize, 1, 5, 17, 33, 60] {
                let direct = ln_gaussian_moment(nu as f64, q, beta).unwrap();
                assert!((table[nu] - direct).abs() < 1e-11 * direct.abs().max(1.0), "q={q} beta={beta} nu={nu}");
            }
        }
    }

    #[test]
    fn fractional_orders() {
        // D_{−1/2}(0) = 2^{−1/4} √π / Γ(3/4)
        let exact = 2f64.powf(-0.25) * std::f64::consts::PI.sqrt() / libm::tgamma(0.75);
        assert_relative_eq!(parabolic_cylinder_d(-0.5, 0.0).unwrap(), exact, max_relative = 1e-9);
    }
}
