use super::KernelSpec;
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::{halfline_grid, GridSpec};
use serde::Serialize;

/// A truncated diagonal integral with its resolution check and an estimate
/// of what the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassReport<T> {
    pub value: T,
    /// Same integral with twice the points per panel.
    pub doubled: T,
    /// Power-law estimate of the mass beyond the finite cutoff.
    pub remainder: T,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> MassReport<T> {
    /// Value plus the estimated remainder.
    pub fn total(&self) -> T {
        self.value + self.remainder
    }

    pub fn resolution_gap(&self) -> T {
        (self.value - self.doubled).abs()
    }
}

fn integrate_diag<T: Real, F: Fn(T) -> T>(
    spec: &KernelSpec<T>,
    lo: T,
    hi: T,
    ppd: usize,
    k: usize,
    weight: F,
) -> Result<T> {
    let g = halfline_grid(lo, hi, ppd, k)?;
    let prepared = spec.prepare(&g.nodes)?;
    Ok((0..g.len()).fold(T::zero(), |acc, i| {
        acc + g.weights[i] * weight(g.nodes[i]) * prepared.get(i, i)
    }))
}

fn check_half_line<T: Real>(spec: &KernelSpec<T>) -> Result<()> {
    if spec.domain().0 != T::zero() {
        return Err(domain("diagonal masses are defined for half-line kernels"));
    }
    Ok(())
}

/// `int_R^{x_max} K(x,x) dx` on a geometric grid, with `grid.x_max` as cutoff.
pub fn tail_mass<T: Real>(spec: &KernelSpec<T>, r: T, grid: &GridSpec) -> Result<MassReport<T>> {
    check_half_line(spec)?;
    if !(r > T::zero()) {
        return Err(domain(format!("tail_mass needs R > 0, got {r}")));
    }
    let upper = T::lit(grid.x_max);
    let (value, doubled) = if r < upper {
        (
            integrate_diag(spec, r, upper, grid.panels_per_decade, grid.k, |_| T::one())?,
            integrate_diag(spec, r, upper, grid.panels_per_decade, 2 * grid.k, |_| T::one())?,
        )
    } else {
        (T::zero(), T::zero())
    };
    // K(x,x) ~ C x^{-p} beyond the cutoff
    let edge = r.max(upper);
    let d1 = spec.diagonal(edge)?;
    let d0 = spec.diagonal(edge / T::lit(2.0))?;
    let p = (d0 / d1).ln() / T::lit(2.0).ln();
    let remainder = if p > T::one() && d1 > T::zero() {
        d1 * edge / (p - T::one())
    } else {
        T::infinity()
    };
    Ok(MassReport {
        value,
        doubled,
        remainder,
        lower: r,
        upper,
    })
}

/// `int_{x_min}^delta x K(x,x) dx`, with `grid.x_min` as the lower cutoff.
pub fn zero_mass<T: Real>(spec: &KernelSpec<T>, delta: T, grid: &GridSpec) -> Result<MassReport<T>> {
    check_half_line(spec)?;
    if !(delta > T::zero()) {
        return Err(domain(format!("zero_mass needs delta > 0, got {delta}")));
    }
    let lower = T::lit(grid.x_min);
    let (value, doubled) = if delta > lower {
        (
            integrate_diag(spec, lower, delta, grid.panels_per_decade, grid.k, |x| x)?,
            integrate_diag(spec, lower, delta, grid.panels_per_decade, 2 * grid.k, |x| x)?,
        )
    } else {
        (T::zero(), T::zero())
    };
    // x K(x,x) ~ C x^q below the cutoff
    let edge = lower.min(delta);
    let f1 = edge * spec.diagonal(edge)?;
    let f2 = T::lit(2.0) * edge * spec.diagonal(T::lit(2.0) * edge)?;
    let q = (f2 / f1).ln() / T::lit(2.0).ln();
    let remainder = if q > -T::one() && f1 >= T::zero() {
        f1 * edge / (q + T::one())
    } else {
        T::infinity()
    };
    Ok(MassReport {
        value,
        doubled,
        remainder,
        lower,
        upper: delta,
    })
}
