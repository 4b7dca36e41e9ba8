//! Special functions and quadrature rules.

mod bessel;
mod gamma;
mod jacobi;
mod quadrature;

pub use bessel::{bessel_hankel, bessel_j, bessel_miller, bessel_series, switchover};
pub use gamma::{log_gamma, log_gamma_ratio};
pub use jacobi::{jacobi_p, jacobi_p_all};
pub use quadrature::{gauss_legendre, halfline_grid, legendre_grid, GridSpec, QuadratureGrid};

pub(crate) use bessel::{bessel_j_any_order, bessel_j_unchecked};
pub(crate) use gamma::ln_gamma_pos;
pub(crate) use jacobi::jacobi_fill;
