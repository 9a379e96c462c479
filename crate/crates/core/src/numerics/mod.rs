//! Special functions and log-space quadrature.

mod quadrature;
mod special;

pub use quadrature::{
    integrate_log_space, LogQuadrature, QuadratureResult, DEFAULT_MAX_SUBDIVISIONS, DEFAULT_REL_TOL,
};
pub use special::{erf, erfc, ln_std_normal_pdf, std_normal_cdf, std_normal_pdf, LN_INV_SQRT_2PI};
