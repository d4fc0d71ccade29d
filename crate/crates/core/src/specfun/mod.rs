//! Special functions and quadrature used by the analytic modules.

mod confluent;
mod gamma;
mod legendre;
pub mod quadrature;

pub use confluent::{
    gamma_log_mean, kummer_u, kummer_u_scaled, ln_gaussian_moment, ln_gaussian_moment_table, meijer_g_log,
    parabolic_cylinder_d, parabolic_cylinder_d_upward,
};
pub(crate) use confluent::log_add;
pub use gamma::{digamma, double_factorial, ln_binomial, ln_double_factorial, ln_factorial, ln_gamma};
pub(crate) use gamma::lgamma;
pub use legendre::{hyp2f1, legendre_p};
pub(crate) use legendre::{i_pow, ln_legendre_neg_order};
pub use quadrature::{chebyshev_gauss_rule, gauss_laguerre_rule, QuadratureKind, QuadratureRule};
