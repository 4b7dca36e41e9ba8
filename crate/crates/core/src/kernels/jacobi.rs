use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::{bessel_j_unchecked, jacobi_fill};

pub(crate) fn check_ns<T: Real>(n: usize, s: T) -> Result<()> {
    if n == 0 {
        return Err(domain("kernel degree n must be at least 1"));
    }
    if !(s > -T::one()) || !s.is_finite() {
        return Err(domain(format!("closed-form kernels need s > -1, got {s}")));
    }
    Ok(())
}

fn check_open_unit<T: Real>(u: T) -> Result<()> {
    if !(u.abs() < T::one()) {
        return Err(domain(format!("u must lie in (-1, 1), got {u}")));
    }
    Ok(())
}

fn check_positive<T: Real>(v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(domain(format!("kernel arguments must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Christoffel-Darboux kernel on `(-1, 1)` for the weight `(1-u)^s`, with the
/// weight and norm folded in so that it projects in plain `L^2(du)`.
pub fn cd_kernel<T: Real>(n: usize, s: T, u1: T, u2: T) -> Result<T> {
    check_ns(n, s)?;
    check_open_unit(u1)?;
    check_open_unit(u2)?;
    let one = T::one();
    let two = T::lit(2.0);
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    jacobi_fill(s, u1, &mut p);
    jacobi_fill(s, u2, &mut q);
    let mut acc = T::zero();
    for l in 0..n {
        acc = acc + (two * T::from_usize_lossy(l) + s + one) * p[l] * q[l];
    }
    let weight = ((one - u1) * (one - u2)).powf(s / two) / two.powf(s + one);
    Ok(acc * weight)
}

/// Per-point data for `K^_n^(s)`: `r = (lam-1)/(lam+1)`, the weight
/// `(1+lam)^{-s/2-1}` and `P_0..P_n` at `r`.
#[derive(Debug, Clone)]
pub(crate) struct HatPoint<T> {
    pub lam: T,
    pub r: T,
    pub weight: T,
    pub p: Vec<T>,
}

impl<T: Real> HatPoint<T> {
    pub fn new(n: usize, s: T, lam: T) -> Self {
        let one = T::one();
        let r = (lam - one) / (lam + one);
        let mut p = vec![T::zero(); n + 1];
        jacobi_fill(s, r, &mut p);
        Self {
            lam,
            r,
            weight: (lam + one).powf(-(s / T::lit(2.0) + one)),
            p,
        }
    }
}

pub(crate) fn hat_sum<T: Real>(n: usize, s: T, a: &HatPoint<T>, b: &HatPoint<T>) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let mut acc = T::zero();
    for l in 0..n {
        acc = acc + (two * T::from_usize_lossy(l) + s + one) * a.p[l] * b.p[l];
    }
    acc * a.weight * b.weight
}

pub(crate) fn hat_cd<T: Real>(n: usize, s: T, a: &HatPoint<T>, b: &HatPoint<T>) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let nf = T::from_usize_lossy(n);
    let pref = nf * (nf + s) / (two * nf + s);
    let bracket = a.p[n] * b.p[n - 1] - b.p[n] * a.p[n - 1];
    // weight^(s/2) = weight_full * (1 + lam)
    let w = a.weight * (a.lam + one) * b.weight * (b.lam + one);
    pref * bracket / (a.lam - b.lam) * w
}

pub(crate) const NEAR_DIAGONAL: f64 = 1e-6;
// The CD bracket loses about -log10|r1 - r2| digits.
const R_CLOSE: f64 = 1e-3;

pub(crate) fn hat_from_points<T: Real>(n: usize, s: T, a: &HatPoint<T>, b: &HatPoint<T>) -> T {
    let near = (a.lam - b.lam).abs() < T::lit(NEAR_DIAGONAL) * a.lam.max(T::one());
    if near || (a.r - b.r).abs() < T::lit(R_CLOSE) {
        hat_sum(n, s, a, b)
    } else {
        hat_cd(n, s, a, b)
    }
}

/// Christoffel-Darboux kernel on `(0, inf)` after `u = (lam-1)/(lam+1)`.
pub fn hat_kernel<T: Real>(n: usize, s: T, lam1: T, lam2: T) -> Result<T> {
    check_ns(n, s)?;
    check_positive(lam1)?;
    check_positive(lam2)?;
    let a = HatPoint::new(n, s, lam1);
    let b = HatPoint::new(n, s, lam2);
    Ok(hat_from_points(n, s, &a, &b))
}

/// `K^_n` by the spectral sum only.
pub fn hat_kernel_sum<T: Real>(n: usize, s: T, lam1: T, lam2: T) -> Result<T> {
    check_ns(n, s)?;
    check_positive(lam1)?;
    check_positive(lam2)?;
    Ok(hat_sum(n, s, &HatPoint::new(n, s, lam1), &HatPoint::new(n, s, lam2)))
}

/// `K^_n` by the two-term Christoffel-Darboux form only (`lam1 != lam2`).
pub fn hat_kernel_cd<T: Real>(n: usize, s: T, lam1: T, lam2: T) -> Result<T> {
    check_ns(n, s)?;
    check_positive(lam1)?;
    check_positive(lam2)?;
    if lam1 == lam2 {
        return Err(domain("the two-term form is singular on the diagonal"));
    }
    Ok(hat_cd(n, s, &HatPoint::new(n, s, lam1), &HatPoint::new(n, s, lam2)))
}

/// `K_n(x1, x2) = n^2 K^_n(n^2 x1, n^2 x2)`.
pub fn rescaled_kernel<T: Real>(n: usize, s: T, x1: T, x2: T) -> Result<T> {
    let n2 = T::from_usize_lossy(n * n);
    Ok(n2 * hat_kernel(n, s, n2 * x1, n2 * x2)?)
}

/// Distance between the normalized Jacobi polynomial and its Bessel limit:
/// `| n (n^2 x + 1)^{-(a+1)/2} P_n^{(a,0)}(r) - J_a(2/sqrt x)/sqrt x |`
/// with `r = (n^2 x - 1)/(n^2 x + 1)`.
pub fn heine_mehler_residual<T: Real>(n: usize, alpha: T, x: T) -> Result<T> {
    if !(alpha > -T::one()) {
        return Err(domain(format!("heine_mehler_residual needs alpha > -1, got {alpha}")));
    }
    check_positive(x)?;
    let one = T::one();
    let two = T::lit(2.0);
    let nf = T::from_usize_lossy(n);
    let lam = nf * nf * x;
    let r = (lam - one) / (lam + one);
    let mut p = vec![T::zero(); n + 1];
    jacobi_fill(alpha, r, &mut p);
    let scaled = nf * (lam + one).powf(-(alpha + one) / two) * p[n];
    let target = bessel_j_unchecked(alpha, two / x.sqrt()) / x.sqrt();
    Ok((scaled - target).abs())
}
