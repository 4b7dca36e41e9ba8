use crate::error::{domain, Result};
use crate::scalar::Real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// zeta(2), zeta(3), ..., zeta(30)
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain(format!("log_gamma needs a finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

// Caller guarantees x > 0.
pub(crate) fn ln_gamma_pos<T: Real>(x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let quarter = T::lit(0.25);
    if x >= T::lit(10.0) {
        return stirling(x);
    }
    if (x - one).abs() <= quarter {
        return ln_gamma_1p(x - one);
    }
    if (x - two).abs() <= quarter {
        let z = x - two;
        return ln_gamma_1p(z) + z.ln_1p();
    }
    if x < T::lit(0.75) {
        return ln_gamma_pos(x + one) - x.ln();
    }
    if x < two {
        // (1.25, 1.75): step up once, away from the zero at 2
        return ln_gamma_pos(x + one) - x.ln();
    }
    let mut prod = one;
    let mut y = x;
    while y < T::lit(10.0) {
        prod = prod * y;
        y = y + one;
    }
    stirling(y) - prod.ln()
}

fn stirling<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    let ln_sqrt_2pi = T::lit(0.918_938_533_204_672_8);
    let r = x.recip();
    let r2 = r * r;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1})
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let mut series = T::zero();
    for c in coeffs.iter().rev() {
        series = series * r2 + T::lit(*c);
    }
    (x - half) * x.ln() - x + ln_sqrt_2pi + series * r
}

// ln Gamma(1 + z) for |z| <= 1/4 by the zeta series
fn ln_gamma_1p<T: Real>(z: T) -> T {
    let mut acc = T::zero();
    let mut zk = z;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = i + 2;
        zk = zk * z;
        let term = T::lit(*zeta) * zk / T::from_usize_lossy(k);
        acc = if k % 2 == 0 { acc + term } else { acc - term };
    }
    acc - T::lit(EULER_GAMMA) * z
}

/// `ln(Gamma(t + a)) - ln(Gamma(t + b))` for large `t`, accurate when the two
/// values nearly cancel.
pub fn log_gamma_ratio<T: Real>(t: T, a: T, b: T) -> Result<T> {
    if !(t + a > T::zero()) || !(t + b > T::zero()) {
        return Err(domain("log_gamma_ratio needs t + a > 0 and t + b > 0"));
    }
    if t < T::lit(50.0) {
        return Ok(ln_gamma_pos(t + a) - ln_gamma_pos(t + b));
    }
    Ok(stirling_diff(t, a) - stirling_diff(t, b))
}

// ln Gamma(t + a) - [(t - 1/2) ln t - t + ln sqrt(2 pi)], small relative to the
// full value, so differences of it do not cancel catastrophically.
pub(crate) fn stirling_diff<T: Real>(t: T, a: T) -> T {
    let half = T::lit(0.5);
    let x = t + a;
    let r = x.recip();
    let r2 = r * r;
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let mut series = T::zero();
    for c in coeffs.iter().rev() {
        series = series * r2 + T::lit(*c);
    }
    // (x - 1/2) ln x - x  minus  (t - 1/2) ln t - t
    let lr = (a / t).ln_1p();
    (x - half) * lr + a * t.ln() - a + series * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_values() {
        assert_eq!(log_gamma(1.0f64).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0f64).unwrap(), 0.0);
        let half = log_gamma(0.5f64).unwrap();
        assert_relative_eq!(half, 0.5 * std::f64::consts::PI.ln(), max_relative = 1e-14);
    }

    #[test]
    fn recurrence_from_half() {
        let mut expected = 0.5 * std::f64::consts::PI.ln();
        for k in 0..10 {
            expected += (k as f64 + 0.5).ln();
        }
        assert_relative_eq!(log_gamma(10.5f64).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn factorials() {
        let mut lf = 0.0f64;
        for n in 1..170u32 {
            // ln Gamma(n+1) = ln n!
            lf += (n as f64).ln();
            let got = log_gamma(n as f64 + 1.0).unwrap();
            assert_relative_eq!(got, lf, max_relative = 1e-13, epsilon = 1e-15);
        }
    }

    #[test]
    fn near_roots_relative() {
        // ln Gamma(1+z) ~ -gamma z as z -> 0
        let z = 1e-9f64;
        let v = log_gamma(1.0 + z).unwrap();
        assert_relative_eq!(v, -EULER_GAMMA * z, max_relative = 1e-8);
        let v2 = log_gamma(2.0 + z).unwrap();
        assert_relative_eq!(v2, (1.0 - EULER_GAMMA) * z, max_relative = 1e-8);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0f64).is_err());
        assert!(log_gamma(-1.5f64).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn ratio_matches_difference() {
        for &t in &[60.0f64, 1e3, 1e5] {
            let direct = ln_gamma_pos(t + 0.5) - ln_gamma_pos(t - 0.25);
            let r = log_gamma_ratio(t, 0.5, -0.25).unwrap();
            assert_relative_eq!(r, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn works_in_f32() {
        let v: f32 = log_gamma(4.0f32).unwrap();
        assert!((v - 6.0f32.ln()).abs() < 1e-6);
    }
}
