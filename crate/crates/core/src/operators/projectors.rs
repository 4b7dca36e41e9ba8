use super::subspace::{hat_functions, n_shift, ORTHO_TOL};
use super::{discretize, DiscreteOperator};
use crate::error::{domain, Error, Result};
use crate::specfun::bessel_j_any_order;
use crate::kernels::KernelSpec;
use crate::Grid;
use nalgebra::{DMatrix, SymmetricEigen};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(domain(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// `G^{-1/2}` of a positive semidefinite Gram matrix, keeping directions whose
/// singular value exceeds `ORTHO_TOL` relative to the largest. Returns the
/// `m x k` factor and `k`.
fn inverse_sqrt(gram: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let eig = SymmetricEigen::new((gram + gram.transpose()) * 0.5);
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    if !(top > 0.0) {
        return Ok((DMatrix::zeros(gram.nrows(), 0), Vec::new()));
    }
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k].max(0.0).sqrt() > ORTHO_TOL * top.sqrt())
        .collect();
    let m = gram.nrows();
    let mut out = DMatrix::zeros(m, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let scale = eig.eigenvalues[k].powf(-0.5);
        for r in 0..m {
            out[(r, c)] = eig.eigenvectors[(r, k)] * scale;
        }
    }
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((out, sv))
}

/// Projector onto `exp(-beta x / 2) H^(s,n)` with `H^(s,n)` the rescaled space
/// `{ p(n^2 x) / (n^2 x + 1)^{n + s/2} : deg p < n }`.
///
/// The basis is the orthonormal Jacobi family (parameter `s`, or `s + 2 n_s`
/// with `n - n_s` members when `s <= -1`) plus, for `s <= -1`, the powers
/// `(n^2 x + 1)^{-s/2-j}`, `j = 1..n_s`, weighted and re-orthonormalized
/// against the grid's own inner product.
#[derive(Debug, Clone)]
pub struct WeightedProjector {
    pub n: usize,
    pub s: f64,
    pub beta: f64,
    jacobi_count: usize,
    jacobi_param: f64,
    extras: usize,
    coeff: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl WeightedProjector {
    pub fn new(n: usize, s: f64, beta: f64, quad: &Grid) -> Result<Self> {
        check_beta(beta)?;
        if n == 0 {
            return Err(domain("weighted projector needs n >= 1"));
        }
        let (jacobi_count, jacobi_param, extras) = if s > -1.0 {
            (n, s, 0)
        } else {
            let ns = n_shift(s)?;
            if n <= ns {
                return Err(domain(format!("needs n > n_s = {ns} for s = {s}")));
            }
            (n - ns, s + 2.0 * ns as f64, ns)
        };
        let mut me = Self {
            n,
            s,
            beta,
            jacobi_count,
            jacobi_param,
            extras,
            coeff: DMatrix::zeros(0, 0),
            singular_values: Vec::new(),
        };
        let m = jacobi_count + extras;
        let mut gram = DMatrix::<f64>::zeros(m, m);
        let mut raw = vec![0.0; m];
        for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
            me.raw_features(x, &mut raw);
            let g = (-beta * x).exp();
            for a in 0..m {
                for b in 0..=a {
                    gram[(a, b)] += w * g * raw[a] * raw[b];
                }
            }
        }
        for a in 0..m {
            for b in 0..a {
                gram[(b, a)] = gram[(a, b)];
            }
        }
        let (coeff, sv) = inverse_sqrt(&gram)?;
        if coeff.ncols() != n {
            return Err(Error::Construction {
                expected: n,
                found: coeff.ncols(),
                singular_values: sv,
            });
        }
        me.coeff = coeff;
        me.singular_values = sv;
        Ok(me)
    }

    /// Square roots of the Gram eigenvalues, largest first.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    fn raw_features(&self, x: f64, out: &mut [f64]) {
        let nn = (self.n * self.n) as f64;
        let lam = nn * x;
        hat_functions(self.jacobi_param, self.jacobi_count, lam, out);
        for v in out[..self.jacobi_count].iter_mut() {
            *v *= self.n as f64;
        }
        for j in 1..=self.extras {
            out[self.jacobi_count + j - 1] = (lam + 1.0).powf(-self.s / 2.0 - j as f64);
        }
    }

    /// `sqrt(w_i) * f_k(x_i)` for an orthonormal basis `f_k` of the weighted space.
    pub fn orthonormal_columns(&self, grid: &Grid) -> DMatrix<f64> {
        let m = self.jacobi_count + self.extras;
        let mut raw = vec![0.0; m];
        let mut f = DMatrix::zeros(grid.len(), m);
        for (i, (&x, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
            self.raw_features(x, &mut raw);
            let scale = (w * (-self.beta * x).exp()).sqrt();
            for a in 0..m {
                f[(i, a)] = scale * raw[a];
            }
        }
        f * &self.coeff
    }

    /// The projector on `grid`; the Gram quadrature stays the one used at construction.
    pub fn on_grid(&self, grid: &Grid) -> Result<DiscreteOperator> {
        let p = self.orthonormal_columns(grid);
        DiscreteOperator::new(&p * p.transpose(), grid.clone())
    }
}


/// `Pi^(n,s,beta)` discretized on `grid`; the grid also supplies the Gram quadrature.
pub fn weighted_projector(n: usize, s: f64, beta: f64, grid: &Grid) -> Result<DiscreteOperator> {
    WeightedProjector::new(n, s, beta, grid)?.on_grid(grid)
}

/// Eigenvalues of the discretized Bessel kernel above this are taken as its range.
pub const RANGE_THRESHOLD: f64 = 0.5;

/// Projector onto `exp(-beta x / 2) H^(s)`, the weighted range of the modified
/// Bessel kernel, on a fixed grid.
///
/// The range is read off the Nystrom matrix by spectral truncation, weighted
/// and re-orthonormalized. For `s <= -1` the kernel has parameter `s + 2 n_s`
/// and the weighted functions `x^{-s/2-1}` and `J_{s+2k-1}(2/sqrt x)/sqrt x`,
/// `k = 1..n_s`, join the span before orthonormalization.
#[derive(Debug, Clone)]
pub struct LimitProjector {
    pub s: f64,
    pub beta: f64,
    pub kernel_param: f64,
    pub threshold: f64,
    base_rank: usize,
    operator: DiscreteOperator,
}

impl LimitProjector {
    pub fn new(s: f64, beta: f64, grid: &Grid) -> Result<Self> {
        Self::with_threshold(s, beta, RANGE_THRESHOLD, grid)
    }

    pub fn with_threshold(s: f64, beta: f64, threshold: f64, grid: &Grid) -> Result<Self> {
        check_beta(beta)?;
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(domain(format!("range threshold must lie in (0, 1), got {threshold}")));
        }
        if grid.nodes.iter().any(|&x| !(x > 0.0)) {
            return Err(domain("limit projector needs a grid inside (0, inf)"));
        }
        let (kernel_param, extras) = if s > -1.0 {
            (s, 0)
        } else {
            let ns = n_shift(s)?;
            (s + 2.0 * ns as f64, ns)
        };
        let kernel = KernelSpec::modified_bessel(kernel_param)?;
        let eig = SymmetricEigen::new(discretize(&kernel, grid)?.matrix);
        let keep: Vec<usize> = (0..grid.len()).filter(|&k| eig.eigenvalues[k] > threshold).collect();
        let sqrt_g: Vec<f64> = grid.nodes.iter().map(|&x| (-beta * x / 2.0).exp()).collect();
        let base = DMatrix::from_fn(grid.len(), keep.len(), |i, c| sqrt_g[i] * eig.eigenvectors[(i, keep[c])]);
        let base_rank = orthonormal_range(&base).ncols();
        if base_rank == 0 {
            return Err(Error::Construction { expected: 1, found: 0, singular_values: Vec::new() });
        }
        let cols = if extras > 0 {
            let mut all = DMatrix::zeros(grid.len(), keep.len() + extras + 1);
            all.columns_mut(0, keep.len()).copy_from(&base);
            let first = keep.len();
            for (i, (&x, &w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
                let scale = w.sqrt() * sqrt_g[i];
                all[(i, first)] = scale * x.powf(-s / 2.0 - 1.0);
                let z = 2.0 / x.sqrt();
                for k in 1..=extras {
                    all[(i, first + k)] = scale * bessel_j_any_order(s + 2.0 * k as f64 - 1.0, z) / x.sqrt();
                }
            }
            orthonormal_range(&all)
        } else {
            orthonormal_range(&base)
        };
        let operator = DiscreteOperator::new(&cols * cols.transpose(), grid.clone())?;
        Ok(Self { s, beta, kernel_param, threshold, base_rank, operator })
    }

    /// Rank of the weighted kernel range before the extra functions are added.
    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    /// Number of independent directions contributed by the extra functions.
    pub fn added_rank(&self) -> usize {
        self.rank() - self.base_rank
    }

    pub fn rank(&self) -> usize {
        self.operator.matrix.trace().round() as usize
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.operator
    }

    pub fn into_operator(self) -> DiscreteOperator {
        self.operator
    }
}

/// Left singular vectors of `m` whose singular value exceeds `ORTHO_TOL`
/// relative to the largest.
fn orthonormal_range(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.max();
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| top > 0.0 && svd.singular_values[k] > ORTHO_TOL * top)
        .collect();
    DMatrix::from_fn(m.nrows(), cols.len(), |i, c| u[(i, cols[c])])
}

/// `Pi^(s,beta)` discretized on `grid`.
pub fn limit_projector(s: f64, beta: f64, grid: &Grid) -> Result<DiscreteOperator> {
    Ok(LimitProjector::new(s, beta, grid)?.into_operator())
}
