//! Nystrom discretization of kernels, subspace bases and the projectors built
//! from them, with traces and trace norms.

mod dump;
mod projectors;
mod subspace;

pub use dump::{read_binary, write_binary, write_csv};
pub use projectors::{
    limit_projector, weighted_projector, LimitProjector, WeightedProjector, RANGE_THRESHOLD,
};
pub use subspace::{h_space_basis, h_space_spanning_set, n_shift, SubspaceBasis, ORTHO_TOL};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::Grid;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Symmetric matrix `sqrt(w_i) K(x_i, x_j) sqrt(w_j)` together with its grid, so
/// that matrix traces and trace norms are those of the integral operator.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: DMatrix<f64>,
    pub grid: Grid,
}

impl DiscreteOperator {
    pub fn new(matrix: DMatrix<f64>, grid: Grid) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::Usage(format!(
                "matrix is {}x{} but the grid has {} nodes",
                matrix.nrows(),
                matrix.ncols(),
                grid.len()
            )));
        }
        Ok(Self { matrix, grid })
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Kernel value `K(x_i, x_j)` recovered from the weighted entry.
    pub fn kernel_value(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)] / (self.grid.weights[i] * self.grid.weights[j]).sqrt()
    }

    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }

    /// `||A^2 - A||_F`
    pub fn idempotency_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).norm()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = symmetrized(&self.matrix).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Number of eigenvalues above `tol` times the largest magnitude.
    pub fn rank(&self, tol: f64) -> usize {
        let ev = self.eigenvalues();
        let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ev.iter().filter(|v| v.abs() > tol * top).count()
    }

    /// Submatrix on the nodes inside `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let idx = self.grid.indices_within(lo, hi);
        if idx.is_empty() {
            return Err(Error::Usage(format!("no grid nodes inside [{lo}, {hi}]")));
        }
        let matrix = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])]);
        let grid = Grid {
            nodes: idx.iter().map(|&i| self.grid.nodes[i]).collect(),
            weights: idx.iter().map(|&i| self.grid.weights[i]).collect(),
            interval: (lo, hi),
            breaks: vec![lo, hi],
        };
        Ok(Self { matrix, grid })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(self, other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            grid: self.grid.clone(),
        })
    }
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn check_same_grid(a: &DiscreteOperator, b: &DiscreteOperator) -> Result<()> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::Usage("operators live on different grids".into()));
    }
    Ok(())
}

/// Nystrom matrix of a kernel on a grid. Rows are filled in parallel.
pub fn discretize(kernel: &KernelSpec<f64>, grid: &Grid) -> Result<DiscreteOperator> {
    let prepared = kernel.prepare(&grid.nodes)?;
    let n = grid.len();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| sw[i] * prepared.get(i, j) * sw[j]).collect())
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    DiscreteOperator::new(m, grid.clone())
}

/// Nystrom matrix of an arbitrary symmetric kernel given as a closure.
pub fn discretize_fn<F: Fn(f64, f64) -> f64 + Sync>(f: F, grid: &Grid) -> DiscreteOperator {
    let n = grid.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        (grid.weights[i] * grid.weights[j]).sqrt() * f(grid.nodes[i], grid.nodes[j])
    });
    DiscreteOperator {
        matrix: m,
        grid: grid.clone(),
    }
}

pub fn trace(op: &DiscreteOperator) -> f64 {
    op.matrix.trace()
}

/// Sum of singular values; for the symmetric matrices here, of `|eigenvalues|`.
pub fn trace_norm(op: &DiscreteOperator) -> f64 {
    op.eigenvalues().iter().map(|v| v.abs()).sum()
}

pub fn trace_norm_distance(a: &DiscreteOperator, b: &DiscreteOperator) -> Result<f64> {
    Ok(trace_norm(&a.sub(b)?))
}

/// `sqrt(f) K sqrt(f)` with `f(x) = min(x, 1)`.
pub fn conjugate_sqrt_f(op: &DiscreteOperator) -> DiscreteOperator {
    conjugate_by(op, |x| x.min(1.0))
}

/// `sqrt(f) K sqrt(f)` for a caller-supplied nonnegative `f`.
pub fn conjugate_by<F: Fn(f64) -> f64>(op: &DiscreteOperator, f: F) -> DiscreteOperator {
    let r: Vec<f64> = op.grid.nodes.iter().map(|&x| f(x).sqrt()).collect();
    let n = op.dim();
    let m = DMatrix::from_fn(n, n, |i, j| r[i] * op.matrix[(i, j)] * r[j]);
    DiscreteOperator {
        matrix: m,
        grid: op.grid.clone(),
    }
}
