use super::DiscreteOperator;
use crate::error::{domain, Error, Result};
use crate::specfun::jacobi_fill;
use crate::Grid;
use nalgebra::DMatrix;

/// Relative singular-value cutoff below which directions count as dependent.
pub const ORTHO_TOL: f64 = 1e-8;

/// Smallest positive integer `k` with `s + 2k > -1`.
pub fn n_shift(s: f64) -> Result<usize> {
    if !(s <= -1.0) || !s.is_finite() {
        return Err(domain(format!("n_shift is defined for s <= -1, got {s}")));
    }
    let mut k = 1usize;
    while s + 2.0 * k as f64 <= -1.0 {
        k += 1;
    }
    Ok(k)
}

/// Functions sampled at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub functions: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub orthonormal: bool,
    pub grid: Grid,
}

impl SubspaceBasis {
    pub fn new(functions: Vec<Vec<f64>>, labels: Vec<String>, grid: Grid) -> Result<Self> {
        if functions.iter().any(|f| f.len() != grid.len()) {
            return Err(Error::Usage("function samples do not match the grid".into()));
        }
        if labels.len() != functions.len() {
            return Err(Error::Usage("one label per function expected".into()));
        }
        Ok(Self {
            functions,
            labels,
            orthonormal: false,
            grid,
        })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Columns `sqrt(w_i) f(x_i)`; inner products of functions become dot products.
    pub fn weighted_matrix(&self) -> DMatrix<f64> {
        let n = self.grid.len();
        DMatrix::from_fn(n, self.len(), |i, j| self.grid.weights[i].sqrt() * self.functions[j][i])
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.weighted_matrix();
        m.transpose() * m
    }

    /// Singular values of the weighted sample matrix, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.weighted_matrix().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn numerical_rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&v| v > tol * top).count()
    }

    /// Orthonormal basis of the span, dropping directions with relative
    /// singular value below `tol`.
    pub fn orthonormalize(&self, tol: f64) -> Result<Self> {
        if self.is_empty() {
            return Ok(Self {
                orthonormal: true,
                ..self.clone()
            });
        }
        let svd = self.weighted_matrix().svd(true, false);
        let u = svd.u.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
        let sv = &svd.singular_values;
        let top = sv.iter().fold(0.0f64, |m, &v| m.max(v));
        let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > tol * top).collect();
        let functions = keep
            .iter()
            .map(|&k| {
                (0..self.grid.len())
                    .map(|i| u[(i, k)] / self.grid.weights[i].sqrt())
                    .collect()
            })
            .collect();
        let labels = (0..keep.len()).map(|k| format!("orthonormal_{k}")).collect();
        Ok(Self {
            functions,
            labels,
            orthonormal: true,
            grid: self.grid.clone(),
        })
    }

    /// Orthonormalize and insist on a given rank.
    pub fn orthonormalize_exact(&self, tol: f64, expected: usize) -> Result<Self> {
        let out = self.orthonormalize(tol)?;
        if out.len() != expected {
            return Err(Error::Construction {
                expected,
                found: out.len(),
                singular_values: self.singular_values(),
            });
        }
        Ok(out)
    }

    /// Each function multiplied by `f`.
    pub fn multiplied_by<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let fx: Vec<f64> = self.grid.nodes.iter().map(|&x| f(x)).collect();
        Self {
            functions: self
                .functions
                .iter()
                .map(|v| v.iter().zip(&fx).map(|(a, b)| a * b).collect())
                .collect(),
            labels: self.labels.clone(),
            orthonormal: false,
            grid: self.grid.clone(),
        }
    }

    /// Orthogonal projector onto the span (orthonormalizing first if needed).
    pub fn projector(&self) -> Result<DiscreteOperator> {
        let b = if self.orthonormal {
            self.clone()
        } else {
            self.orthonormalize(ORTHO_TOL)?
        };
        let v = b.weighted_matrix();
        DiscreteOperator::new(&v * v.transpose(), self.grid.clone())
    }
}

/// `sqrt(2l+s+1) (lam+1)^{-s/2-1} P_l^{(s,0)}(r)`, `l < count`: the orthonormal
/// functions of the half-line Christoffel-Darboux kernel.
pub(crate) fn hat_functions(s: f64, count: usize, lam: f64, out: &mut [f64]) {
    let r = (lam - 1.0) / (lam + 1.0);
    jacobi_fill(s, r, &mut out[..count]);
    let w = (lam + 1.0).powf(-(s / 2.0 + 1.0));
    for (l, v) in out[..count].iter_mut().enumerate() {
        *v *= (2.0 * l as f64 + s + 1.0).sqrt() * w;
    }
}

/// Sampled spanning set of the space `H^(s,n)` (or its unrescaled version).
///
/// For `s > -1` these are the `n` orthonormal Jacobi functions. For `s <= -1`
/// it is the union of the two Jacobi families with parameters `s + 2 n_s - 1`
/// and `s + 2 n_s`, reduced to an orthonormal basis whose rank must be `n`.
/// `rescaled` evaluates at `n^2 x` instead of `x`.
pub fn h_space_basis(n: usize, s: f64, grid: &Grid, rescaled: bool) -> Result<SubspaceBasis> {
    h_space_spanning_set(n, s, grid, rescaled)?.orthonormalize_exact(ORTHO_TOL, n)
}

/// The raw spanning set before orthonormalization (for rank diagnostics).
pub fn h_space_spanning_set(n: usize, s: f64, grid: &Grid, rescaled: bool) -> Result<SubspaceBasis> {
    if n == 0 {
        return Err(domain("h_space_basis needs n >= 1"));
    }
    if grid.nodes.iter().any(|&x| !(x > 0.0)) {
        return Err(domain("h_space_basis needs a grid inside (0, inf)"));
    }
    if s > -1.0 {
        let mut buf = vec![0.0; n];
        let scale = if rescaled { (n * n) as f64 } else { 1.0 };
        let mut cols = vec![Vec::with_capacity(grid.len()); n];
        for &x in &grid.nodes {
            hat_functions(s, n, scale * x, &mut buf);
            for l in 0..n {
                cols[l].push(buf[l]);
            }
        }
        return SubspaceBasis::new(cols, (0..n).map(|l| format!("L[{l}]")).collect(), grid.clone());
    }
    let ns = n_shift(s)?;
    if n <= ns {
        return Err(domain(format!("h_space_basis needs n > n_s = {ns} for s = {s}")));
    }
    let m = n - ns;
    let scale = if rescaled { (n * n) as f64 } else { 1.0 };
    let alpha_v = s + 2.0 * ns as f64 - 1.0;
    let alpha_l = s + 2.0 * ns as f64;
    let mut functions = vec![Vec::with_capacity(grid.len()); 2 * m + 1];
    let mut pv = vec![0.0; m + 1];
    let mut pl = vec![0.0; m];
    for &x in &grid.nodes {
        let lam = scale * x;
        let r = (lam - 1.0) / (lam + 1.0);
        jacobi_fill(alpha_v, r, &mut pv);
        jacobi_fill(alpha_l, r, &mut pl);
        let wv = (lam + 1.0).powf(-s / 2.0 - 1.0);
        let wl = (lam + 1.0).powf(-alpha_l / 2.0 - 1.0);
        for l in 0..=m {
            functions[l].push(wv * pv[l]);
        }
        for l in 0..m {
            functions[m + 1 + l].push(wl * pl[l]);
        }
    }
    let labels = (0..=m)
        .map(|l| format!("V[{l}]"))
        .chain((0..m).map(|l| format!("L[{l}]")))
        .collect();
    SubspaceBasis::new(functions, labels, grid.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts() {
        assert_eq!(n_shift(-1.0).unwrap(), 1);
        assert_eq!(n_shift(-1.5).unwrap(), 1);
        assert_eq!(n_shift(-3.0).unwrap(), 2);
        assert_eq!(n_shift(-3.2).unwrap(), 2);
        assert!(n_shift(-0.5).is_err());
    }
}
