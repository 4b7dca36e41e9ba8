//! Closed-form kernels: Jacobi Christoffel-Darboux kernels on `(-1,1)` and
//! `(0,inf)`, their `n^2` rescaling, and the Bessel kernels.

mod bessel;
mod jacobi;
mod mass;

pub use bessel::{bessel_kernel_tw, bessel_kernel_tw_quadrature, modified_bessel_kernel};
pub use jacobi::{
    cd_kernel, hat_kernel, hat_kernel_cd, hat_kernel_sum, heine_mehler_residual, rescaled_kernel,
};
pub use mass::{tail_mass, zero_mass, MassReport};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use bessel::{tw_from_points, BesselPoint};
use jacobi::{check_ns, hat_from_points, HatPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `K~_n` on `(-1, 1)`
    CdU,
    /// `K^_n` on `(0, inf)`
    Hat,
    /// `n^2 K^_n(n^2 x, n^2 y)`
    Rescaled,
    /// Bessel kernel `J~_s`
    BesselTw,
    /// `J^(s)`, the Bessel kernel after `y = 4/x`
    ModifiedBessel,
}

impl Family {
    pub fn needs_degree(self) -> bool {
        matches!(self, Family::CdU | Family::Hat | Family::Rescaled)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::CdU => "cd_u",
            Family::Hat => "hat",
            Family::Rescaled => "rescaled",
            Family::BesselTw => "bessel_tw",
            Family::ModifiedBessel => "modified_bessel",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cd_u" => Ok(Family::CdU),
            "hat" => Ok(Family::Hat),
            "rescaled" => Ok(Family::Rescaled),
            "bessel_tw" => Ok(Family::BesselTw),
            "modified_bessel" => Ok(Family::ModifiedBessel),
            other => Err(Error::Usage(format!(
                "unknown kernel family {other:?} (expected cd_u, hat, rescaled, bessel_tw or modified_bessel)"
            ))),
        }
    }
}

/// A fully specified kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec<T> {
    pub family: Family,
    pub n: Option<usize>,
    pub s: T,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(family: Family, n: Option<usize>, s: T) -> Result<Self> {
        if family.needs_degree() {
            let n = n.ok_or_else(|| domain(format!("family {} needs a degree n", family.name())))?;
            check_ns(n, s)?;
        } else if !(s > -T::one()) {
            return Err(domain(format!("Bessel kernels need s > -1, got {s}")));
        }
        let n = if family.needs_degree() { n } else { None };
        Ok(Self { family, n, s })
    }

    pub fn cd_u(n: usize, s: T) -> Result<Self> {
        Self::new(Family::CdU, Some(n), s)
    }

    pub fn hat(n: usize, s: T) -> Result<Self> {
        Self::new(Family::Hat, Some(n), s)
    }

    pub fn rescaled(n: usize, s: T) -> Result<Self> {
        Self::new(Family::Rescaled, Some(n), s)
    }

    pub fn bessel_tw(s: T) -> Result<Self> {
        Self::new(Family::BesselTw, None, s)
    }

    pub fn modified_bessel(s: T) -> Result<Self> {
        Self::new(Family::ModifiedBessel, None, s)
    }

    /// Natural domain: `(-1, 1)` for `cd_u`, otherwise `(0, inf)`.
    pub fn domain(&self) -> (T, T) {
        match self.family {
            Family::CdU => (-T::one(), T::one()),
            _ => (T::zero(), T::infinity()),
        }
    }

    pub fn eval(&self, x: T, y: T) -> Result<T> {
        let s = self.s;
        match self.family {
            Family::CdU => cd_kernel(self.degree(), s, x, y),
            Family::Hat => hat_kernel(self.degree(), s, x, y),
            Family::Rescaled => rescaled_kernel(self.degree(), s, x, y),
            Family::BesselTw => bessel_kernel_tw(s, x, y),
            Family::ModifiedBessel => modified_bessel_kernel(s, x, y),
        }
    }

    pub fn diagonal(&self, x: T) -> Result<T> {
        self.eval(x, x)
    }

    fn degree(&self) -> usize {
        self.n.unwrap_or(1)
    }

    /// Precompute per-point data for repeated evaluation on a fixed point set.
    pub fn prepare(&self, points: &[T]) -> Result<PreparedKernel<T>> {
        let (lo, hi) = self.domain();
        if let Some(bad) = points.iter().find(|&&p| !(p > lo && p < hi)) {
            return Err(domain(format!(
                "point {bad} is outside the domain of the {} kernel",
                self.family.name()
            )));
        }
        let n = self.degree();
        let s = self.s;
        let data = match self.family {
            Family::CdU => {
                // reuse the half-line machinery through lam = (1+u)/(1-u)
                let one = T::one();
                Prepared::Cd(
                    points
                        .iter()
                        .map(|&u| {
                            let lam = (one + u) / (one - u);
                            let jac = (T::lit(2.0) / ((lam + one) * (lam + one))).sqrt();
                            (HatPoint::new(n, s, lam), jac)
                        })
                        .collect(),
                )
            }
            Family::Hat => Prepared::Hat(points.iter().map(|&l| HatPoint::new(n, s, l)).collect()),
            Family::Rescaled => {
                let n2 = T::from_usize_lossy(n * n);
                Prepared::Hat(points.iter().map(|&x| HatPoint::new(n, s, n2 * x)).collect())
            }
            Family::BesselTw => {
                Prepared::Bessel(points.iter().map(|&y| BesselPoint::new(s, y)).collect())
            }
            Family::ModifiedBessel => {
                let four = T::lit(4.0);
                Prepared::Bessel(points.iter().map(|&x| BesselPoint::new(s, four / x)).collect())
            }
        };
        Ok(PreparedKernel {
            spec: *self,
            points: points.to_vec(),
            data,
        })
    }
}

#[derive(Debug, Clone)]
enum Prepared<T> {
    Cd(Vec<(HatPoint<T>, T)>),
    Hat(Vec<HatPoint<T>>),
    Bessel(Vec<BesselPoint<T>>),
}

/// Kernel with per-point data cached; `get(i, j)` is `K(points[i], points[j])`.
#[derive(Debug, Clone)]
pub struct PreparedKernel<T> {
    spec: KernelSpec<T>,
    points: Vec<T>,
    data: Prepared<T>,
}

impl<T: Real> PreparedKernel<T> {
    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let n = self.spec.degree();
        let s = self.spec.s;
        match &self.data {
            Prepared::Cd(v) => {
                // K~(u1,u2) = K^(lam1,lam2) / (jac1 jac2)
                let (a, ja) = &v[i];
                let (b, jb) = &v[j];
                hat_from_points(n, s, a, b) / (*ja * *jb)
            }
            Prepared::Hat(v) => {
                let k = hat_from_points(n, s, &v[i], &v[j]);
                if self.spec.family == Family::Rescaled {
                    T::from_usize_lossy(n * n) * k
                } else {
                    k
                }
            }
            Prepared::Bessel(v) => {
                let k = tw_from_points(s, &v[i], &v[j]);
                if self.spec.family == Family::ModifiedBessel {
                    T::lit(4.0) / (self.points[i] * self.points[j]) * k
                } else {
                    k
                }
            }
        }
    }
}

/// Row-major values `K(xs[i], ys[j])`; rows are computed in parallel, each
/// entry independently, so the result does not depend on the schedule.
pub fn evaluate_lattice<T: Real>(spec: &KernelSpec<T>, xs: &[T], ys: &[T]) -> Result<Vec<T>> {
    let mut all = xs.to_vec();
    all.extend_from_slice(ys);
    let prepared = spec.prepare(&all)?;
    let nx = xs.len();
    let rows: Vec<Vec<T>> = (0..nx)
        .into_par_iter()
        .map(|i| (0..ys.len()).map(|j| prepared.get(i, nx + j)).collect())
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(count - 1)
                }
            })
            .collect(),
    }
}

/// `sup |A - B|` over a square lattice on `[lo, hi]^2`.
pub fn sup_distance_on_lattice<T: Real>(
    a: &KernelSpec<T>,
    b: &KernelSpec<T>,
    lo: T,
    hi: T,
    count: usize,
) -> Result<T> {
    let pts = linspace(lo, hi, count);
    let va = evaluate_lattice(a, &pts, &pts)?;
    let vb = evaluate_lattice(b, &pts, &pts)?;
    Ok(va
        .iter()
        .zip(&vb)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prepared_matches_direct() {
        let pts = [0.01f64, 0.3, 0.3 + 1e-9, 1.0, 7.5, 40.0];
        for spec in [
            KernelSpec::hat(5, 0.5).unwrap(),
            KernelSpec::rescaled(7, -0.5).unwrap(),
            KernelSpec::bessel_tw(0.0).unwrap(),
            KernelSpec::modified_bessel(1.5).unwrap(),
        ] {
            let p = spec.prepare(&pts).unwrap();
            for i in 0..pts.len() {
                for j in 0..pts.len() {
                    let d = spec.eval(pts[i], pts[j]).unwrap();
                    assert!((p.get(i, j) - d).abs() <= 1e-12 * d.abs().max(1.0));
                }
            }
        }
        let us = [-0.9f64, -0.2, 0.0, 0.5, 0.95];
        let spec = KernelSpec::cd_u(6, 1.7).unwrap();
        let p = spec.prepare(&us).unwrap();
        for i in 0..us.len() {
            for j in 0..us.len() {
                let d = spec.eval(us[i], us[j]).unwrap();
                assert!((p.get(i, j) - d).abs() <= 1e-12 * d.abs().max(1.0), "{i} {j}");
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(Family::Hat, None, 0.0f64).is_err());
        assert!(KernelSpec::rescaled(0, 0.0f64).is_err());
        assert!(KernelSpec::modified_bessel(-1.5f64).is_err());
        assert_eq!("rescaled".parse::<Family>().unwrap(), Family::Rescaled);
        assert!("bogus".parse::<Family>().is_err());
        assert!(KernelSpec::hat(3, 0.0f64).unwrap().prepare(&[0.0]).is_err());
    }

    #[test]
    fn lattice_shape() {
        let spec = KernelSpec::rescaled(4, 0.5f64).unwrap();
        let xs = linspace(0.2, 5.0, 25);
        let v = evaluate_lattice(&spec, &xs, &xs).unwrap();
        assert_eq!(v.len(), 625);
        assert_eq!(v[1], spec.eval(xs[0], xs[1]).unwrap());
    }
}
