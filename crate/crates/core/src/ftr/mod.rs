//! Fluctuating two-ray fading: series coefficients, distribution functions and sampler.

mod coeff;
mod params;
mod sampler;
mod series;

pub use coeff::{coeff_d, coeff_d_detailed, coeff_d_integral, coeff_d_legendre, CoeffD, CoeffRoute, CANCELLATION_LIMIT};
pub use params::FtrParams;
pub use sampler::{sample, FtrSampler};
pub(crate) use sampler::sample_link;
pub use series::{
    build_series, build_series_converged, cdf, cdf_asymptotic, moment, pdf, FtrSeries, SeriesViolation, DEFAULT_TERMS,
    MOMENT_TOL, NORMALIZATION_TOL, TRUNCATION_LIMIT,
};
