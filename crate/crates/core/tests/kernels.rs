use besselforge::kernels::{
    bessel_kernel_tw, cd_kernel, hat_kernel, hat_kernel_cd, hat_kernel_sum, heine_mehler_residual,
    modified_bessel_kernel, rescaled_kernel, tail_mass, zero_mass, KernelSpec,
};
use besselforge::specfun::{bessel_j, halfline_grid, legendre_grid, GridSpec};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// int_{-1}^{1} f(u) du through u = 1 - 2 v^2, which smooths the (1-u)^s factor.
fn integrate_u<F: Fn(f64) -> f64>(f: F) -> f64 {
    let g = legendre_grid(16, 24, 0.0, 1.0).unwrap();
    g.integrate(|v| 4.0 * v * f(1.0 - 2.0 * v * v))
}

#[test]
fn cd_trace_is_n() {
    for &(n, s) in &[(5usize, 0.5f64), (1, 0.0), (9, -0.5), (12, 1.7)] {
        let t = integrate_u(|u| cd_kernel(n, s, u, u).unwrap());
        assert!((t - n as f64).abs() < 1e-10, "n={n} s={s}: {t}");
    }
}

#[test]
fn cd_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a: f64 = rng.random_range(-0.99..0.99);
        let b: f64 = rng.random_range(-0.99..0.99);
        let k1 = cd_kernel(6, 0.3, a, b).unwrap();
        let k2 = cd_kernel(6, 0.3, b, a).unwrap();
        assert!((k1 - k2).abs() <= 1e-14 * k1.abs().max(1.0));
    }
}

#[test]
fn hat_trace_is_n() {
    let g = halfline_grid(1e-12f64, 1e12, 8, 16).unwrap();
    let t = g.integrate(|l| hat_kernel(6, 0.0, l, l).unwrap());
    assert!((t - 6.0).abs() < 1e-6, "{t}");
}

#[test]
fn rescaled_trace_is_n() {
    let g = halfline_grid(1e-14f64, 1e10, 8, 16).unwrap();
    let t = g.integrate(|x| rescaled_kernel(6, 0.0, x, x).unwrap());
    assert!((t - 6.0).abs() < 1e-6, "{t}");
}

#[test]
fn representations_agree_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &n in &[4usize, 8, 16] {
        for &s in &[-0.5f64, 0.0, 1.7] {
            for _ in 0..100 {
                let l1 = 10f64.powf(rng.random_range(-3.0..3.0));
                let l2 = 10f64.powf(rng.random_range(-3.0..3.0));
                let cd = hat_kernel_cd(n, s, l1, l2).unwrap();
                let sum = hat_kernel_sum(n, s, l1, l2).unwrap();
                let scale = (hat_kernel(n, s, l1, l1).unwrap() * hat_kernel(n, s, l2, l2).unwrap()).sqrt();
                assert!((cd - sum).abs() <= 1e-9 * scale, "n={n} s={s} ({l1},{l2})");
            }
        }
    }
}

#[test]
fn reproducing_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &(s, hi) in &[(0.0f64, 1e10), (0.5, 1e10), (-0.5, 1e16)] {
        let g = halfline_grid(1e-12, hi, 8, 16).unwrap();
        let n = 5;
        let spec = KernelSpec::hat(n, s).unwrap();
        for _ in 0..10 {
            let l1 = 10f64.powf(rng.random_range(-2.0..2.0));
            let l2 = 10f64.powf(rng.random_range(-2.0..2.0));
            let both = g.integrate(|t| spec.eval(l1, t).unwrap() * spec.eval(t, l2).unwrap());
            let direct = spec.eval(l1, l2).unwrap();
            assert!((both - direct).abs() < 1e-7, "s={s}: {both} vs {direct}");
        }
    }
}

#[test]
fn pointwise_limit_improves() {
    let j = modified_bessel_kernel(0.0, 1.0, 2.0).unwrap();
    let errs: Vec<f64> = [16usize, 32, 64]
        .iter()
        .map(|&n| (rescaled_kernel(n, 0.0f64, 1.0, 2.0).unwrap() - j).abs())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn bessel_diagonal_against_riemann_sum() {
    // the defining integral with J_{1/2}(z)^2 = 2 sin^2 z / (pi z), midpoint rule
    let m = 100_000;
    let y = 4.0f64;
    let mut acc = 0.0;
    for i in 0..m {
        let t = (i as f64 + 0.5) / m as f64;
        let z = (t * y).sqrt();
        acc += 2.0 * z.sin().powi(2) / (std::f64::consts::PI * z);
    }
    let integral = acc / m as f64;
    let kernel = bessel_kernel_tw(0.5, y, y).unwrap();
    assert!((4.0 * kernel - integral).abs() < 1e-8, "{kernel} vs {integral}");
}

#[test]
fn bessel_gram_is_psd() {
    let ys = [1.0f64, 2.0, 3.0, 5.0, 8.0];
    let m = DMatrix::from_fn(5, 5, |i, j| bessel_kernel_tw(0.0, ys[i], ys[j]).unwrap());
    let ev = m.symmetric_eigenvalues();
    assert!(ev.min() >= -1e-10);
}

#[test]
fn transport_of_the_zero_mass() {
    let s = 0.5;
    let grid = GridSpec::default();
    let spec = KernelSpec::modified_bessel(s).unwrap();
    let lhs = zero_mass(&spec, 1.0, &grid).unwrap();
    // y = 4/x maps [x_min, 1] onto [4, 4/x_min]
    let g = halfline_grid(4.0, 4.0 / grid.x_min, 8, 16).unwrap();
    let rhs = 4.0 * g.integrate(|y| bessel_kernel_tw(s, y, y).unwrap() / y);
    assert!((lhs.value - rhs).abs() < 1e-6, "{} vs {rhs}", lhs.value);
    assert!(lhs.remainder > 0.0 && lhs.remainder < 1e-3);
}

#[test]
fn modified_bessel_tail_decreases() {
    let spec = KernelSpec::modified_bessel(0.0).unwrap();
    let grid = GridSpec { x_max: 1e8, ..GridSpec::default() };
    let t: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&r| tail_mass(&spec, r, &grid).unwrap().total())
        .collect();
    assert!(t.iter().all(|v| v.is_finite()));
    assert!(t[0] > t[1] && t[1] > t[2], "{t:?}");
}

#[test]
fn heine_mehler_decreases() {
    for &(a, x) in &[(0.5f64, 1.0f64), (0.0, 4.0)] {
        let r: Vec<f64> = [32usize, 64, 128, 256]
            .iter()
            .map(|&n| heine_mehler_residual(n, a, x).unwrap())
            .collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    }
    let target = bessel_j(0.0f64, 1.0).unwrap() / 2.0;
    assert!((target - 0.765_197_686_6 / 2.0).abs() < 1e-10);
}

#[test]
fn rescaled_tail_masses() {
    let spec = KernelSpec::rescaled(8, 1.5).unwrap();
    let grid = GridSpec::default();
    let t: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&r| tail_mass(&spec, r, &grid).unwrap().value)
        .collect();
    assert!(t.windows(2).all(|w| w[1] < w[0]), "{t:?}");
    // the whole trace split at x_min
    let all = tail_mass(&spec, grid.x_min, &grid).unwrap();
    let below = halfline_grid(1e-16, grid.x_min, 8, 16)
        .unwrap()
        .integrate(|x| spec.diagonal(x).unwrap());
    assert!((all.total() + below - 8.0).abs() < 1e-6, "{}", all.total() + below);
    assert!(all.resolution_gap() < 1e-10);
}

#[test]
fn rescaled_zero_masses() {
    let spec = KernelSpec::rescaled(16, 0.0).unwrap();
    let grid = GridSpec::default();
    let z: Vec<f64> = [1.0, 0.5, 0.1]
        .iter()
        .map(|&d| zero_mass(&spec, d, &grid).unwrap().value)
        .collect();
    assert!(z.windows(2).all(|w| w[1] < w[0]), "{z:?}");
    assert_eq!(zero_mass(&spec, grid.x_min, &grid).unwrap().value, 0.0);
}

proptest! {
    #[test]
    fn hat_symmetric(l1 in 1e-3f64..1e3, l2 in 1e-3f64..1e3, s in -0.9f64..3.0, n in 1usize..20) {
        let a = hat_kernel(n, s, l1, l2).unwrap();
        let b = hat_kernel(n, s, l2, l1).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn hat_diagonal_positive(l in 1e-4f64..1e4, s in -0.9f64..3.0, n in 1usize..30) {
        prop_assert!(hat_kernel(n, s, l, l).unwrap() > 0.0);
    }

    #[test]
    fn bessel_symmetric(y1 in 0.01f64..500.0, y2 in 0.01f64..500.0, s in -0.9f64..3.0) {
        let a = bessel_kernel_tw(s, y1, y2).unwrap();
        let b = bessel_kernel_tw(s, y2, y1).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn cauchy_schwarz(y1 in 0.01f64..500.0, y2 in 0.01f64..500.0, s in -0.9f64..3.0) {
        let k = bessel_kernel_tw(s, y1, y2).unwrap();
        let d = (bessel_kernel_tw(s, y1, y1).unwrap() * bessel_kernel_tw(s, y2, y2).unwrap()).sqrt();
        prop_assert!(k.abs() <= d * (1.0 + 1e-10));
    }
}
