//! Numerical laboratory for Jacobi and Bessel determinantal kernels.
//!
//! Scalar-generic code (`specfun`, `kernels`, `pickrell`) works over any
//! [`Real`]; the linear algebra in `operators` and `sampling` is `f64`.

pub mod error;
pub mod scalar;
pub mod kernels;
pub mod operators;
pub mod pickrell;
pub mod sampling;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = specfun::QuadratureGrid<f64>;
