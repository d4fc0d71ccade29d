use crate::error::{domain, Result};

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("x = {x}, need x > 0")));
    }
    Ok(libm::lgamma_r(x).0)
}

/// `ln_gamma` without the domain check, for callers that already hold a positive argument.
#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// ln(n!) for a non-negative integer.
#[inline]
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        lgamma(n as f64 + 1.0)
    }
}

/// ln C(n, k).
#[inline]
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Digamma function ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", format!("x = {x}, need x > 0")));
    }
    let mut x = x;
    let mut acc = 0.0;
    // shift up so the asymptotic series is accurate to double precision
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// Double factorial n!! for odd n ≥ −1 (with (−1)!! = 1).
pub fn double_factorial(n: i64) -> Result<f64> {
    Ok(ln_double_factorial(n)?.exp())
}

/// ln(n!!) for odd n ≥ −1.
pub fn ln_double_factorial(n: i64) -> Result<f64> {
    if n < -1 || n % 2 == 0 {
        return Err(domain(
            "double_factorial",
            format!("n = {n}, need an odd integer >= -1"),
        ));
    }
    if n <= 1 {
        return Ok(0.0);
    }
    // (2k+1)!! = (2k+1)! / (2^k k!)
    let k = ((n - 1) / 2) as usize;
    Ok(ln_factorial(n as usize) - k as f64 * std::f64::consts::LN_2 - ln_factorial(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_reference_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_relative_eq!(ln_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(
            ln_gamma(0.5).unwrap(),
            0.572_364_942_924_700_087_07,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ln_gamma(150.3).unwrap(),
            601.511_960_833_536_322_64,
            max_relative = 1e-14
        );
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0).unwrap() + euler).abs() < 1e-13);
        assert!((digamma(2.0).unwrap() - (1.0 - euler)).abs() < 1e-13);
        assert!((digamma(10.0).unwrap() - 2.251_752_589_066_721_107_6).abs() < 1e-13);
        assert!((digamma(0.25).unwrap() - (-4.227_453_533_376_265_4)).abs() < 1e-12);
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn digamma_recurrence() {
        for i in 1..200 {
            let x = 0.137 * i as f64;
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1).unwrap(), 1.0);
        assert_eq!(double_factorial(1).unwrap(), 1.0);
        assert_relative_eq!(double_factorial(5).unwrap(), 15.0, max_relative = 1e-14);
        assert_relative_eq!(double_factorial(9).unwrap(), 945.0, max_relative = 1e-14);
        assert!(double_factorial(4).is_err());
        // 161!! overflows nothing in log space
        assert!(ln_double_factorial(161).unwrap().is_finite());
    }

    #[test]
    fn binomial_logs() {
        assert_relative_eq!(ln_binomial(10, 3).exp(), 120.0, max_relative = 1e-13);
        assert_eq!(ln_binomial(7, 0), 0.0);
    }
}
