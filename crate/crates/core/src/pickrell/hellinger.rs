use crate::error::{domain, Result};
use crate::sampling::neumaier_sum;
use crate::specfun::{gauss_legendre, log_gamma_ratio};
use crate::Real;
use rayon::prelude::*;
use serde::Serialize;

fn check<T: Real>(n: usize, s: T, s2: T) -> Result<()> {
    let nf = T::from_usize_lossy(n);
    if n < 2 || !(nf + s > T::one()) || !(nf + s2 > T::one()) || !s.is_finite() || !s2.is_finite() {
        return Err(domain(format!("Hellinger integral needs n >= 2, n + s > 1 and n + s' > 1 (n = {n}, s = {s}, s' = {s2})")));
    }
    Ok(())
}

/// Smallest `n` accepted by [`hellinger_exact`] for the pair.
pub fn min_valid_n(s: f64, s2: f64) -> usize {
    let mut n = 2usize;
    while !(n as f64 + s > 1.0 && n as f64 + s2 > 1.0) {
        n += 1;
    }
    n
}

/// `ln Hel(n, s, s')`, built from differences `ln Gamma(t + a) - ln Gamma(t + b)`
/// so that nothing of size `n ln n` is formed.
pub fn hellinger_log<T: Real>(n: usize, s: T, s2: T) -> Result<T> {
    check(n, s, s2)?;
    let half = T::lit(0.5);
    let mid = (s + s2) * half;
    let nf = T::from_usize_lossy(n);
    let two_n = nf + nf;
    let first = (log_gamma_ratio(two_n - T::one(), s, mid)? + log_gamma_ratio(two_n - T::one(), s2, mid)?) * half;
    let second = (log_gamma_ratio(two_n, s, mid)? + log_gamma_ratio(two_n, s2, mid)?) * half;
    let third = log_gamma_ratio(nf, mid, s)? + log_gamma_ratio(nf, mid, s2)?;
    // never positive in exact arithmetic
    Ok((first + second + third).min(T::zero()))
}

/// Hellinger integral between the radial laws for parameters `s` and `s'`
/// at level `n`, in closed Gamma-ratio form.
pub fn hellinger_exact<T: Real>(n: usize, s: T, s2: T) -> Result<T> {
    Ok(hellinger_log(n, s, s2)?.exp())
}

/// `int_from^to u^{p-1} (1-u)^{q-1} e^{-shift} du` by composite Gauss-Legendre.
/// When `from` is zero the panels are refined geometrically toward it and the
/// last sliver is integrated as `u^{p-1}`.
fn one_sided<T: Real>(p: T, q: T, from: T, to: T, shift: T) -> T {
    let one = T::one();
    let log_f = |u: T| (p - one) * u.ln() + (q - one) * (-u).ln_1p() - shift;
    let panels = 32;
    let mut breaks: Vec<T> =
        (0..=panels).map(|k| from + (to - from) * T::from_usize_lossy(k) / T::from_usize_lossy(panels)).collect();
    let mut sliver = T::zero();
    if from == T::zero() {
        let first = breaks[1];
        breaks[0] = first * T::lit(0.5f64.powi(40));
        let extra: Vec<T> = (1..40).map(|k| first * T::lit(0.5f64.powi(k))).collect();
        breaks.extend(extra);
        breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        let eps = breaks[0];
        sliver = (p * eps.ln() - p.ln() - shift).exp();
    }
    let (nodes, weights) = gauss_legendre(16);
    let mut sum = sliver;
    for w in breaks.windows(2) {
        let c = (w[0] + w[1]) * T::lit(0.5);
        let h = (w[1] - w[0]) * T::lit(0.5);
        for (&x, &wt) in nodes.iter().zip(&weights) {
            sum = sum + h * T::lit(wt) * log_f(c + h * T::lit(x)).exp();
        }
    }
    sum
}

/// `ln B(a, b)` by quadrature of `t^{a-1} (1-t)^{b-1}` over a window around
/// its peak, in log space. The part right of the peak is integrated in
/// `u = 1 - t` so that both endpoints are resolved in floating point.
fn log_beta_quadrature<T: Real>(a: T, b: T) -> T {
    let one = T::one();
    let span = a + b - T::lit(2.0);
    let peak = if span > T::zero() { ((a - one) / span).max(T::zero()).min(one) } else { T::lit(0.5) };
    // standard deviation of the Beta(a, b) law
    let width = (a * b / ((a + b) * (a + b) * (a + b + one))).sqrt();
    let lo = (peak - T::lit(40.0) * width).max(T::zero());
    let hi = (peak + T::lit(40.0) * width).min(one);
    // a peak on the boundary would leave its singular end unrefined
    let split = if peak > lo && peak < hi { peak } else { (lo + hi) * T::lit(0.5) };
    let inner = split.max(T::lit(1e-300)).min(one - T::epsilon());
    let shift = (a - one) * inner.ln() + (b - one) * (-inner).ln_1p();
    let left = if split > lo { one_sided(a, b, lo, split, shift) } else { T::zero() };
    let right = if hi > split { one_sided(b, a, one - hi, one - split, shift) } else { T::zero() };
    (left + right).ln() + shift
}

/// Independent evaluation of the Hellinger integral as a ratio of Beta
/// integrals, each computed by quadrature after `t = r / (1 + r)`: the
/// Beta-prime normalizations are `1 / B(k, n + p)` and the overlap integrals
/// are `B(k, n + (s + s')/2)`, for `k = n - 1` and `k = n`.
pub fn hellinger_oracle<T: Real>(n: usize, s: T, s2: T) -> Result<T> {
    check(n, s, s2)?;
    let half = T::lit(0.5);
    let nf = T::from_usize_lossy(n);
    let mid = (s + s2) * half;
    let factor = |k: T| {
        log_beta_quadrature(k, nf + mid) - (log_beta_quadrature(k, nf + s) + log_beta_quadrature(k, nf + s2)) * half
    };
    Ok((factor(nf - T::one()) + factor(nf)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Singular,
    NotDecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Singular => "singular",
            Verdict::NotDecided => "not-decided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HellingerRow {
    pub n: usize,
    pub hel: f64,
    pub one_minus_hel: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HellingerReport {
    pub s: f64,
    pub s2: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub per_n: Vec<HellingerRow>,
    /// Least-squares slope of the partial sums against `ln N` over the top decade.
    pub slope: f64,
    pub r_squared: f64,
    /// Limit of `n (1 - Hel)`, extrapolated from `n_max / 2` and `n_max`.
    pub fitted_c: f64,
    /// `(s - s')^2 / 8`
    pub candidate_difference: f64,
    /// `(s + s')^2 / 8`
    pub candidate_sum: f64,
    pub verdict: Verdict,
}

/// Hellinger terms for `n = n_min..=n_max`, their partial sums, and the
/// divergence test: singular when the top-decade regression of partial sums
/// on `ln N` has `R^2 > 0.99`, positive slope, and slope within 10% of the
/// fitted `c`.
pub fn kakutani_scan(s: f64, s2: f64, n_max: usize) -> Result<HellingerReport> {
    let n_min = min_valid_n(s, s2);
    if n_max < n_min {
        return Err(domain(format!("n_max = {n_max} is below the first valid n = {n_min}")));
    }
    let terms: Vec<(usize, f64, f64)> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let l = hellinger_log(n, s, s2)?;
            Ok((n, l.exp(), 0.0 - l.exp_m1()))
        })
        .collect::<Result<_>>()?;
    let mut per_n = Vec::with_capacity(terms.len());
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (n, hel, omh) in terms {
        let t = sum + omh;
        comp += if sum.abs() >= omh.abs() { (sum - t) + omh } else { (omh - t) + sum };
        sum = t;
        per_n.push(HellingerRow { n, hel, one_minus_hel: omh, partial_sum: sum + comp });
    }
    let lo = (n_max / 10).max(n_min);
    let fit: Vec<&HellingerRow> = per_n.iter().filter(|r| r.n >= lo).collect();
    let (slope, r_squared) = regress(
        &fit.iter().map(|r| (r.n as f64).ln()).collect::<Vec<_>>(),
        &fit.iter().map(|r| r.partial_sum).collect::<Vec<_>>(),
    );
    let scaled = |n: usize| n as f64 * per_n[n - n_min].one_minus_hel;
    let half = (n_max / 2).max(n_min);
    let fitted_c = if half < n_max && n_max == 2 * half {
        2.0 * scaled(n_max) - scaled(half)
    } else {
        scaled(n_max)
    };
    let singular = r_squared > 0.99 && slope > 0.0 && fitted_c > 0.0 && ((slope - fitted_c) / fitted_c).abs() < 0.1;
    Ok(HellingerReport {
        s,
        s2,
        n_min,
        n_max,
        per_n,
        slope,
        r_squared,
        fitted_c,
        candidate_difference: (s - s2).powi(2) / 8.0,
        candidate_sum: (s + s2).powi(2) / 8.0,
        verdict: if singular { Verdict::Singular } else { Verdict::NotDecided },
    })
}

/// Least-squares slope and `R^2` of `y` on `x`; a constant `y` gives `(0, 0)`.
fn regress(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = neumaier_sum(x.iter().copied()) / n;
    let my = neumaier_sum(y.iter().copied()) / n;
    let sxx = neumaier_sum(x.iter().map(|a| (a - mx).powi(2)));
    let syy = neumaier_sum(y.iter().map(|b| (b - my).powi(2)));
    let sxy = neumaier_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    (sxy / sxx, sxy * sxy / (sxx * syy))
}
