use crate::error::{domain, Result};
use crate::scalar::Real;

/// Jacobi polynomial `P_l^{(alpha, 0)}(u)`, orthogonal for the weight `(1-u)^alpha`.
pub fn jacobi_p<T: Real>(l: usize, alpha: T, u: T) -> Result<T> {
    check_alpha(alpha)?;
    check_u(u)?;
    let mut out = vec![T::zero(); l + 1];
    jacobi_fill(alpha, u, &mut out);
    Ok(out[l])
}

/// All of `P_0, ..., P_l` at one point.
pub fn jacobi_p_all<T: Real>(l: usize, alpha: T, u: T) -> Result<Vec<T>> {
    check_alpha(alpha)?;
    check_u(u)?;
    let mut out = vec![T::zero(); l + 1];
    jacobi_fill(alpha, u, &mut out);
    Ok(out)
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > -T::one()) {
        return Err(domain(format!("jacobi_p needs alpha > -1, got {alpha}")));
    }
    Ok(())
}

fn check_u<T: Real>(u: T) -> Result<()> {
    if !(u.abs() <= T::one()) {
        return Err(domain(format!("jacobi_p needs u in [-1, 1], got {u}")));
    }
    Ok(())
}

/// Fill `out[k] = P_k^{(alpha,0)}(u)` for `k < out.len()`.
///
/// The recurrence itself only needs `alpha > -2`; the subspace code uses
/// parameters in `(-2, -1]` for polynomials that are not orthogonal there.
pub(crate) fn jacobi_fill<T: Real>(alpha: T, u: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    let one = T::one();
    let two = T::lit(2.0);
    out[0] = one;
    if out.len() == 1 {
        return;
    }
    out[1] = ((alpha + two) * u + alpha) / two;
    let a2 = alpha * alpha;
    for k in 2..out.len() {
        let n = T::from_usize_lossy(k);
        let s = two * n + alpha;
        let c0 = two * n * (n + alpha) * (s - two);
        let c1 = (s - one) * (s * (s - two) * u + a2);
        let c2 = two * (n + alpha - one) * (n - one) * s;
        out[k] = (c1 * out[k - 1] - c2 * out[k - 2]) / c0;
    }
}
