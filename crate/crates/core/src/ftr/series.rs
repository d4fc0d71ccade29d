use super::coeff::{coeff_d_detailed, CoeffRoute};
use super::FtrParams;
use crate::error::{Error, Result};
use crate::specfun::{lgamma, ln_factorial};

/// Default number of series terms.
pub const DEFAULT_TERMS: usize = 80;
/// build_series refuses a truncation whose normalization is off by more than this.
pub const TRUNCATION_LIMIT: f64 = 1e-4;
/// Tolerances of the series invariants.
pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const MOMENT_TOL: f64 = 1e-5;

/// Truncated FTR series: PDF f(x) = Σ_j H_j x^j e^{−x/2σ²} / (j!(2σ²)^{j+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct FtrSeries {
    params: FtrParams,
    d: Vec<f64>,
    h_coeff: Vec<f64>,
    ln_h: Vec<f64>,
    residual_imag_max: f64,
    integral_terms: usize,
}

/// One violated series invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesViolation {
    Normalization { sum: f64 },
    FirstMoment { relative_error: f64 },
    ImaginaryResidual { residual: f64, scale: f64 },
}

impl std::fmt::Display for SeriesViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Normalization { sum } => write!(f, "sum of H_j = {sum:.12} (deviation {:.3e})", sum - 1.0),
            Self::FirstMoment { relative_error } => {
                write!(f, "first-moment identity off by {relative_error:.3e} relative")
            }
            Self::ImaginaryResidual { residual, scale } => {
                write!(f, "imaginary residual {residual:.3e} vs max|d_j| {scale:.3e}")
            }
        }
    }
}

/// Series with `n_terms` terms; fails if the truncation loses more than 1e−4 of the mass.
pub fn build_series(params: FtrParams, n_terms: usize) -> Result<FtrSeries> {
    let s = FtrSeries::unchecked(params, n_terms)?;
    let dev = s.normalization() - 1.0;
    if dev.abs() > TRUNCATION_LIMIT {
        return Err(Error::TruncationInadequate { n_terms, deviation: dev });
    }
    Ok(s)
}

/// Series grown in steps of 40 terms (from `min_terms`) until both sum invariants hold.
pub fn build_series_converged(params: FtrParams, min_terms: usize) -> Result<FtrSeries> {
    let mut n = min_terms.max(1);
    loop {
        let s = FtrSeries::unchecked(params, n)?;
        if (s.normalization() - 1.0).abs() <= NORMALIZATION_TOL && s.first_moment_error().abs() <= MOMENT_TOL {
            return Ok(s);
        }
        if n >= 2000 {
            return Err(Error::TruncationInadequate {
                n_terms: n,
                deviation: s.normalization() - 1.0,
            });
        }
        n += 40;
    }
}

impl FtrSeries {
    /// Series without the truncation check.
    pub fn unchecked(params: FtrParams, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(crate::error::invalid("n_terms", "must be >= 1"));
        }
        let (m, k) = (params.m(), params.k());
        let ln_lead = m * m.ln() - lgamma(m);
        let mut d = Vec::with_capacity(n_terms);
        let mut ln_h = Vec::with_capacity(n_terms);
        let mut residual_imag_max: f64 = 0.0;
        let mut integral_terms = 0;
        for j in 0..n_terms {
            let c = coeff_d_detailed(j, &params)?;
            if c.route == CoeffRoute::AngularIntegral {
                integral_terms += 1;
            }
            residual_imag_max = residual_imag_max.max(c.imag_residual);
            d.push(c.value());
            let ln_kj = if j == 0 {
                0.0
            } else if k == 0.0 {
                f64::NEG_INFINITY
            } else {
                j as f64 * k.ln()
            };
            ln_h.push(ln_lead + ln_kj + c.ln_value - ln_factorial(j));
        }
        let h_coeff = ln_h.iter().map(|v| v.exp()).collect();
        Ok(Self {
            params,
            d,
            h_coeff,
            ln_h,
            residual_imag_max,
            integral_terms,
        })
    }

    pub fn params(&self) -> &FtrParams {
        &self.params
    }

    pub fn n_terms(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn h_coeff(&self) -> &[f64] {
        &self.h_coeff
    }

    pub(crate) fn ln_h(&self) -> &[f64] {
        &self.ln_h
    }

    pub fn residual_imag_max(&self) -> f64 {
        self.residual_imag_max
    }

    /// How many d_j came from the angular integral instead of the Legendre sum.
    pub fn integral_terms(&self) -> usize {
        self.integral_terms
    }

    /// Σ H_j; equals 1 for an untruncated series.
    pub fn normalization(&self) -> f64 {
        self.h_coeff.iter().sum()
    }

    /// Σ H_j (j+1).
    pub fn first_moment_sum(&self) -> f64 {
        self.h_coeff.iter().enumerate().map(|(j, h)| h * (j as f64 + 1.0)).sum()
    }

    /// Σ H_j (j+1) / (1+K) − 1.
    pub fn first_moment_error(&self) -> f64 {
        self.first_moment_sum() / (1.0 + self.params.k()) - 1.0
    }

    /// Invariants that do not hold for this truncation.
    pub fn violations(&self) -> Vec<SeriesViolation> {
        let mut v = Vec::new();
        let sum = self.normalization();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            v.push(SeriesViolation::Normalization { sum });
        }
        let rel = self.first_moment_error();
        if rel.abs() > MOMENT_TOL {
            v.push(SeriesViolation::FirstMoment { relative_error: rel });
        }
        let scale = self.d.iter().cloned().fold(0.0, f64::max);
        if self.residual_imag_max >= 1e-9 * scale {
            v.push(SeriesViolation::ImaginaryResidual {
                residual: self.residual_imag_max,
                scale,
            });
        }
        v
    }

    /// PDF at x ≥ 0.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x >= 0.0) {
            return 0.0;
        }
        let s2 = self.params.diffuse_power();
        let u = x / s2;
        let mut acc = 0.0;
        for (j, lh) in self.ln_h.iter().enumerate() {
            acc += (lh + ln_poisson(j, u)).exp();
        }
        acc / s2
    }

    /// CDF at x ≥ 0, as Σ_j H_j P(j+1, x/2σ²) with P the regularized lower
    /// incomplete gamma function; clamped to [0, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let u = x / self.params.diffuse_power();
        let tails = poisson_upper_tails(u, self.h_coeff.len());
        let v: f64 = self.h_coeff.iter().zip(&tails).map(|(h, t)| h * t).sum();
        v.clamp(0.0, 1.0)
    }

    /// Small-argument CDF m^m d_0 x / (2σ²Γ(m)).
    pub fn cdf_asymptotic(&self, x: f64) -> f64 {
        self.h_coeff[0] * x.max(0.0) / self.params.diffuse_power()
    }

    /// E[h^n] = (2σ²)^n Σ_j H_j (j+n)!/j!.
    pub fn moment(&self, n: u32) -> f64 {
        let s2 = self.params.diffuse_power();
        let sum: f64 = self
            .ln_h
            .iter()
            .enumerate()
            .map(|(j, lh)| (lh + ln_factorial(j + n as usize) - ln_factorial(j)).exp())
            .sum();
        s2.powi(n as i32) * sum
    }
}

/// PDF of a truncated FTR series.
pub fn pdf(x: f64, series: &FtrSeries) -> f64 {
    series.pdf(x)
}

/// CDF of a truncated FTR series.
pub fn cdf(x: f64, series: &FtrSeries) -> f64 {
    series.cdf(x)
}

/// n-th moment of a truncated FTR series.
pub fn moment(n: u32, series: &FtrSeries) -> f64 {
    series.moment(n)
}

/// Small-argument CDF m^m d_0 x / (2σ²Γ(m)), from the parameters alone.
pub fn cdf_asymptotic(x: f64, params: &FtrParams) -> Result<f64> {
    let d0 = coeff_d_detailed(0, params)?;
    let m = params.m();
    let lead = (m * m.ln() - lgamma(m) + d0.ln_value).exp();
    Ok(lead * x.max(0.0) / params.diffuse_power())
}

#[inline]
pub(crate) fn ln_poisson(n: usize, u: f64) -> f64 {
    if u == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * u.ln() - u - ln_factorial(n)
}

/// Pr[Poisson(u) ≥ k] for k = 1..=n.
pub(crate) fn poisson_upper_tails(u: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if u <= 0.0 {
        return out;
    }
    if u <= n as f64 {
        // sum downward from well past the mode; every term is positive
        let top = n.max((u + 40.0 * u.sqrt() + 40.0).ceil() as usize);
        let mut acc = 0.0;
        for i in (1..=top).rev() {
            acc += ln_poisson(i, u).exp();
            if i <= n {
                out[i - 1] = acc;
            }
        }
    } else {
        // the lower cumulative sums are small here, so 1 − C loses nothing
        let mut cum = 0.0;
        for (i, slot) in out.iter_mut().enumerate() {
            cum += ln_poisson(i, u).exp();
            *slot = 1.0 - cum;
        }
    }
    out
}
