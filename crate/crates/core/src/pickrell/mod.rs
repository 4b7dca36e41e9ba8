//! Points of the Pickrell set, the map to atomic measures, and the
//! Hellinger/Kakutani machinery for the radial laws.

mod hellinger;

pub use hellinger::{
    hellinger_exact, hellinger_log, hellinger_oracle, kakutani_scan, min_valid_n, HellingerReport, HellingerRow,
    Verdict,
};

use crate::error::{domain, Error, Result};
use crate::sampling::Configuration;
use crate::Real;
use serde::Serialize;

/// Slack allowed in `gamma >= sum xs`.
pub const DEFICIENCY_SLACK: f64 = 1e-10;

/// `(gamma, x_1 >= x_2 >= ... >= 0)` with finitely many nonzero `x_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickrellPoint<T> {
    pub gamma: T,
    pub xs: Vec<T>,
}

impl<T: Real> PickrellPoint<T> {
    /// Sorts `xs` nonincreasing, drops zeros, and checks `gamma >= sum xs`.
    pub fn new(gamma: T, mut xs: Vec<T>) -> Result<Self> {
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(domain(format!("gamma must be finite and nonnegative, got {gamma}")));
        }
        if let Some(bad) = xs.iter().find(|x| !(**x >= T::zero()) || !x.is_finite()) {
            return Err(domain(format!("coordinates must be finite and nonnegative, got {bad}")));
        }
        xs.retain(|&x| x > T::zero());
        xs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let total = xs.iter().fold(T::zero(), |s, &x| s + x);
        if gamma < total - T::lit(DEFICIENCY_SLACK) {
            return Err(domain(format!("gamma = {gamma} is below the coordinate sum {total}")));
        }
        Ok(Self { gamma, xs })
    }

    pub fn deficiency(&self) -> T {
        self.gamma - self.xs.iter().fold(T::zero(), |s, &x| s + x)
    }

    /// Whether the point lies in the subset where `gamma` equals the coordinate sum.
    pub fn is_balanced(&self) -> bool {
        self.deficiency().abs() <= T::lit(DEFICIENCY_SLACK)
    }
}

/// Finitely many atoms `(location, mass)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicMeasure<T> {
    pub atoms: Vec<(T, T)>,
}

impl<T: Real> AtomicMeasure<T> {
    pub fn total_mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |s, a| s + a.1)
    }
}

/// Atoms at the coordinates `x_i` with masses `f(x_i)`.
pub fn sigma_f<T: Real, F: Fn(T) -> T>(omega: &PickrellPoint<T>, f: F) -> AtomicMeasure<T> {
    AtomicMeasure { atoms: omega.xs.iter().map(|&x| (x, f(x))).collect() }
}

/// Atoms at the coordinates `x_i` with masses `min(x_i, 1)`.
pub fn s_map<T: Real>(omega: &PickrellPoint<T>) -> AtomicMeasure<T> {
    sigma_f(omega, |x| x.min(T::one()))
}

/// The balanced point whose image under `s_map` is `eta`.
pub fn s_inverse<T: Real>(eta: &AtomicMeasure<T>) -> Result<PickrellPoint<T>> {
    for &(x, m) in &eta.atoms {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::NotInImage(format!("atom location {x} is not positive")));
        }
        if (m - x.min(T::one())).abs() > T::lit(1e-9) {
            return Err(Error::NotInImage(format!("atom at {x} has mass {m}, expected {}", x.min(T::one()))));
        }
    }
    let mut xs: Vec<T> = eta.atoms.iter().map(|a| a.0).collect();
    xs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let gamma = xs.iter().fold(T::zero(), |s, &x| s + x);
    Ok(PickrellPoint { gamma, xs })
}

/// `gamma <= r` and `sum min(x_i, 1) <= r`.
pub fn in_omega_p_r<T: Real>(omega: &PickrellPoint<T>, r: T) -> bool {
    let mass = omega.xs.iter().fold(T::zero(), |s, &x| s + x.min(T::one()));
    omega.gamma <= r && mass <= r
}

/// `exp(-beta * sum of points)`.
pub fn psi_mult(config: &Configuration, beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(domain(format!("beta must be positive, got {beta}")));
    }
    Ok((-beta * config.points.iter().sum::<f64>()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_excess_coordinates() {
        assert!(PickrellPoint::new(1.0, vec![0.7, 0.6]).is_err());
        assert!(PickrellPoint::new(1.0, vec![0.5, -0.1]).is_err());
        let p = PickrellPoint::new(2.0, vec![0.5, 0.0, 1.5]).unwrap();
        assert_eq!(p.xs, vec![1.5, 0.5]);
        assert!(p.is_balanced());
    }
}
