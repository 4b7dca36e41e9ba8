use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::{bessel_j_unchecked, gauss_legendre, ln_gamma_pos};

fn check_order<T: Real>(s: T) -> Result<()> {
    if !(s > -T::one()) {
        return Err(domain(format!("Bessel kernels need s > -1, got {s}")));
    }
    Ok(())
}

fn check_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(domain(format!("{name} must be a finite positive number, got {v}")));
    }
    Ok(())
}

/// Values needed to assemble the Bessel kernel at one argument `y`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BesselPoint<T> {
    pub y: T,
    pub root: T,
    pub j: T,
    /// `sqrt(y) * J_s'(sqrt(y))`
    pub root_dj: T,
    pub j_next: T,
}

impl<T: Real> BesselPoint<T> {
    pub fn new(s: T, y: T) -> Self {
        let root = y.sqrt();
        let j = bessel_j_unchecked(s, root);
        let j_next = bessel_j_unchecked(s + T::one(), root);
        Self {
            y,
            root,
            j,
            root_dj: s * j - root * j_next,
            j_next,
        }
    }
}

pub(crate) const NEAR_DIAGONAL: f64 = 1e-6;

pub(crate) fn tw_from_points<T: Real>(s: T, p: &BesselPoint<T>, q: &BesselPoint<T>) -> T {
    let gap = p.y - q.y;
    if gap == T::zero() {
        return tw_diagonal(s, p);
    }
    if gap.abs() < T::lit(NEAR_DIAGONAL) * p.y.max(T::one()) {
        return tw_quadrature_unchecked(s, p.y, q.y);
    }
    (p.j * q.root_dj - p.root_dj * q.j) / (T::lit(2.0) * gap)
}

fn tw_diagonal<T: Real>(s: T, p: &BesselPoint<T>) -> T {
    let two = T::lit(2.0);
    (p.j * p.j - two * s / p.root * p.j * p.j_next + p.j_next * p.j_next) / T::lit(4.0)
}

/// Bessel kernel `J~_s(y1, y2) = (1/4) int_0^1 J_s(sqrt(t y1)) J_s(sqrt(t y2)) dt`.
///
/// Closed two-term form off the diagonal, the Wronskian form on it, and the
/// integral itself for pairs closer than `1e-6 * max(1, y1)`.
pub fn bessel_kernel_tw<T: Real>(s: T, y1: T, y2: T) -> Result<T> {
    check_order(s)?;
    check_positive("y1", y1)?;
    check_positive("y2", y2)?;
    let p = BesselPoint::new(s, y1);
    let q = BesselPoint::new(s, y2);
    Ok(tw_from_points(s, &p, &q))
}

/// The defining t-integral evaluated by composite Gauss-Legendre after `t = v^2`.
pub fn bessel_kernel_tw_quadrature<T: Real>(s: T, y1: T, y2: T) -> Result<T> {
    check_order(s)?;
    check_positive("y1", y1)?;
    check_positive("y2", y2)?;
    Ok(tw_quadrature_unchecked(s, y1, y2))
}

fn tw_quadrature_unchecked<T: Real>(s: T, y1: T, y2: T) -> T {
    let a = y1.sqrt();
    let b = y2.sqrt();
    let top = a.max(b);
    let one = T::one();
    let two = T::lit(2.0);
    let v0 = one.min(top.recip());
    let (gx, gw) = gauss_legendre(16);
    let f = |v: T| two * v * bessel_j_unchecked(s, v * a) * bessel_j_unchecked(s, v * b);
    let panel = |lo: T, hi: T| {
        let half = (hi - lo) / two;
        let mid = (hi + lo) / two;
        gx.iter()
            .zip(&gw)
            .fold(T::zero(), |acc, (&x, &w)| acc + T::lit(w) * f(mid + half * T::lit(x)))
            * half
    };
    // leading power behaviour below the graded panels
    let v_lo = v0 * T::lit(1e-8);
    let lead = two * (a * b / T::lit(4.0)).powf(s) * v_lo.powf(two * s + two)
        / ((two * s + two) * (two * ln_gamma_pos(s + one)).exp());
    let mut acc = lead;
    let mut lo = v_lo;
    let ratio = T::lit(10f64.sqrt());
    while lo < v0 {
        let hi = (lo * ratio).min(v0);
        acc = acc + panel(lo, hi);
        lo = hi;
    }
    if v0 < one {
        let m = ((top * (one - v0)) / two).ceil().to_usize().unwrap_or(1).max(1);
        let step = (one - v0) / T::from_usize_lossy(m);
        for i in 0..m {
            let l = v0 + step * T::from_usize_lossy(i);
            let h = if i + 1 == m { one } else { l + step };
            acc = acc + panel(l, h);
        }
    }
    acc / T::lit(4.0)
}

/// Bessel kernel transported by `y = 4/x`:
/// `J^(s)(x1, x2) = 4/(x1 x2) * J~_s(4/x1, 4/x2)`.
pub fn modified_bessel_kernel<T: Real>(s: T, x1: T, x2: T) -> Result<T> {
    check_order(s)?;
    check_positive("x1", x1)?;
    check_positive("x2", x2)?;
    let four = T::lit(4.0);
    let p = BesselPoint::new(s, four / x1);
    let q = BesselPoint::new(s, four / x2);
    Ok(four / (x1 * x2) * tw_from_points(s, &p, &q))
}
