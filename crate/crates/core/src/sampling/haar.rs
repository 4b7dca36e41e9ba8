use super::{Estimate, RngState};
use crate::error::{Error, Result};
use crate::pickrell::PickrellPoint;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub type CMatrix = DMatrix<Complex64>;

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of standard complex Gaussians (`E|z|^2 = 1`).
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal
/// moved into `Q`.
pub fn sample_haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Usage("unitary size must be at least 1".into()));
    }
    let qr = ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// First `m` rows of a Haar unitary of size `n`: Gram-Schmidt on the rows of
/// an `m x n` Ginibre matrix.
fn haar_rows(m: usize, n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut g = ginibre(m, n, rng);
    for a in 0..m {
        for b in 0..a {
            let proj: Complex64 = (0..n).map(|k| g[(b, k)].conj() * g[(a, k)]).sum();
            for k in 0..n {
                let v = g[(b, k)];
                g[(a, k)] -= proj * v;
            }
        }
        let norm = (0..n).map(|k| g[(a, k)].norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            g[(a, k)] /= norm;
        }
    }
    g
}

/// `Re tr(a* b)`
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Monte Carlo estimate of the double orbital average of
/// `z -> exp(i Re tr(zeta* (u1 z u2^-1)_{m x m}))` over independent Haar
/// pairs `(u1, u2)`; trial `k` uses substream `k`.
pub fn orbital_average(zeta: &CMatrix, z: &CMatrix, trials: usize, rng: &RngState) -> Result<Estimate<Complex64>> {
    let m = zeta.nrows();
    let n = z.nrows();
    if zeta.ncols() != m || z.ncols() != n {
        return Err(Error::Usage("zeta and z must be square".into()));
    }
    if m > n {
        return Err(Error::Usage(format!("corner size m = {m} exceeds n = {n}")));
    }
    if trials == 0 {
        return Err(Error::Usage("orbital_average needs at least one trial".into()));
    }
    let values: Vec<Complex64> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.stream(k as u64);
            let top1 = haar_rows(m, n, &mut r);
            let top2 = haar_rows(m, n, &mut r);
            // (u1 z u2*)_{m x m} = top1 z top2*
            let corner = &top1 * z * top2.adjoint();
            Complex64::from_polar(1.0, real_inner(zeta, &corner))
        })
        .collect();
    Ok(Estimate::from_complex(&values))
}

/// `(tr z*z / n^2, eigenvalues of z*z / n^2 in nonincreasing order)`.
pub fn radial_point(z: &CMatrix) -> Result<PickrellPoint<f64>> {
    let n = z.nrows();
    if z.ncols() != n {
        return Err(Error::Usage("radial_point needs a square matrix".into()));
    }
    if n == 0 {
        return PickrellPoint::new(0.0, Vec::new());
    }
    let scale = (n * n) as f64;
    let h = z.adjoint() * z;
    let gamma = (0..n).map(|i| h[(i, i)].re).sum::<f64>() / scale;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("eigen-solve of z*z did not converge".into()))?;
    let xs: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0) / scale).collect();
    // the eigenvalues carry rounding of relative size eps; keep gamma >= sum
    let total: f64 = xs.iter().sum();
    PickrellPoint::new(gamma.max(total), xs)
}
