use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::gamma::ln_gamma_pos;

/// Bessel function of the first kind `J_nu(x)` for real order `nu > -1`, `x >= 0`.
///
/// At `x = 0` with `nu` in `(-1, 0)` the value is `+inf`.
pub fn bessel_j<T: Real>(nu: T, x: T) -> Result<T> {
    if !(nu > -T::one()) || !nu.is_finite() {
        return Err(domain(format!("bessel_j needs nu > -1, got {nu}")));
    }
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(domain(format!("bessel_j needs finite x >= 0, got {x}")));
    }
    Ok(bessel_j_unchecked(nu, x))
}

/// Argument above which the Hankel expansion is used.
pub fn switchover<T: Real>(nu: T) -> T {
    T::lit(12.0) + T::lit(2.0) * nu.abs()
}

// Below this the power series has no cancellation worth mentioning.
const SERIES_LIMIT: f64 = 2.0;

pub(crate) fn bessel_j_unchecked<T: Real>(nu: T, x: T) -> T {
    if x == T::zero() {
        return if nu == T::zero() {
            T::one()
        } else if nu > T::zero() {
            T::zero()
        } else {
            T::infinity()
        };
    }
    if x <= T::lit(SERIES_LIMIT) {
        bessel_series(nu, x)
    } else if x < switchover(nu) {
        bessel_miller(nu, x)
    } else {
        bessel_hankel(nu, x)
    }
}

/// `J_nu` for any non-integer `nu`, reaching orders `<= -1` by downward
/// recurrence from the first order above -1.
pub(crate) fn bessel_j_any_order<T: Real>(nu: T, x: T) -> T {
    if nu > -T::one() {
        return bessel_j_unchecked(nu, x);
    }
    let steps = (-T::one() - nu).floor().to_usize().unwrap_or(0) + 1;
    let top = nu + T::from_usize_lossy(steps);
    let mut upper = bessel_j_unchecked(top + T::one(), x);
    let mut cur = bessel_j_unchecked(top, x);
    let mut order = top;
    for _ in 0..steps {
        let next = T::lit(2.0) * order / x * cur - upper;
        upper = cur;
        cur = next;
        order = order - T::one();
    }
    cur
}

/// Power series; exposed for the overlap test.
pub fn bessel_series<T: Real>(nu: T, x: T) -> T {
    let half = x / T::lit(2.0);
    let q = half * half;
    let lead = (nu * half.ln() - ln_gamma_pos(nu + T::one())).exp();
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    loop {
        let kf = T::from_usize_lossy(k);
        term = -term * q / (kf * (kf + nu));
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(0.25) * sum.abs() && kf > q.sqrt() {
            break;
        }
        k += 1;
        if k > 500 {
            break;
        }
    }
    lead * sum
}

/// Backward recurrence from a high order, normalized by
/// `(x/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k! J_{nu+2k}(x)`.
pub fn bessel_miller<T: Real>(nu: T, x: T) -> T {
    let top = (x + T::lit(40.0) + T::lit(10.0) * x.sqrt())
        .to_usize()
        .unwrap_or(60);
    let top = top + top % 2;
    let two_over_x = T::lit(2.0) / x;
    let huge = T::lit(1e200);
    // c_k = (nu + 2k) Gamma(nu + k) / k!; r_k = Gamma(nu + k) / k!
    let g1 = ln_gamma_pos(nu + T::one()).exp();
    let mut r = vec![T::zero(); top / 2 + 1];
    r[0] = g1;
    if r.len() > 1 {
        r[1] = g1;
    }
    for k in 2..r.len() {
        let kf = T::from_usize_lossy(k);
        r[k] = r[k - 1] * (nu + kf - T::one()) / kf;
    }
    let mut above = T::zero();
    let mut here = T::lit(1e-30);
    let mut norm = T::zero();
    let mut at_zero = T::zero();
    for m in (0..=top).rev() {
        // here = f_{nu+m}
        if m % 2 == 0 {
            let k = m / 2;
            let c = if k == 0 {
                g1
            } else {
                (nu + T::from_usize_lossy(m)) * r[k]
            };
            norm = norm + c * here;
        }
        if m == 0 {
            at_zero = here;
            break;
        }
        let order = nu + T::from_usize_lossy(m);
        let below = order * two_over_x * here - above;
        above = here;
        here = below;
        if here.abs() > huge {
            let scale = huge.recip();
            here = here * scale;
            above = above * scale;
            norm = norm * scale;
        }
    }
    at_zero * (nu * (x / T::lit(2.0)).ln()).exp() / norm
}

/// Hankel large-argument expansion; exposed for the overlap test.
pub fn bessel_hankel<T: Real>(nu: T, x: T) -> T {
    let mu = T::lit(4.0) * nu * nu;
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut prev = T::infinity();
    for k in 1..200usize {
        let kf = T::from_usize_lossy(k);
        let odd = T::lit(2.0) * kf - T::one();
        let next = term * (mu - odd * odd) / (kf * eight_x);
        if next.abs() >= prev.abs() && k > 2 {
            break;
        }
        prev = term;
        term = next;
        match k % 4 {
            1 => q = q + term,
            2 => p = p - term,
            3 => q = q - term,
            _ => p = p + term,
        }
        if term.abs() < T::epsilon() * T::lit(0.1) {
            break;
        }
    }
    let chi = x - (nu / T::lit(2.0) + T::lit(0.25)) * T::PI();
    let (sin_chi, cos_chi) = chi.sin_cos();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
