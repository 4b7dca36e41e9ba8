use super::{Configuration, RngState};
use crate::error::{Error, Result};
use crate::operators::SubspaceBasis;
use crate::Grid;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Conditional densities down to this are rounding noise and are set to zero.
const DENSITY_FLOOR: f64 = -1e-10;

/// Exact sampler for the projection DPP whose kernel is `V V'` on the atoms
/// of a grid, `V` holding `sqrt(w_i) f_k(x_i)` for an orthonormal basis `f_k`.
#[derive(Debug, Clone)]
pub struct DppSampler {
    columns: DMatrix<f64>,
    grid: Grid,
}

impl DppSampler {
    pub fn new(basis: &SubspaceBasis) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Usage("the DPP basis is empty".into()));
        }
        let columns = basis.weighted_matrix();
        let gram = columns.transpose() * &columns;
        let defect = (gram - DMatrix::identity(basis.len(), basis.len())).amax();
        if defect > 1e-8 {
            return Err(Error::Usage(format!(
                "the DPP basis is not orthonormal on its grid (Gram defect {defect:.3e})"
            )));
        }
        Ok(Self { columns, grid: basis.grid.clone() })
    }

    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `K_ii = sum_k V_ik^2`: the probability that atom `i` is occupied.
    pub fn inclusion_probabilities(&self) -> Vec<f64> {
        self.columns.row_iter().map(|r| r.norm_squared()).collect()
    }

    /// Probability of the atom set `atoms` (of size `rank`): `det(V_S)^2`.
    pub fn subset_probability(&self, atoms: &[usize]) -> f64 {
        let n = self.rank();
        if atoms.len() != n {
            return 0.0;
        }
        let sub = DMatrix::from_fn(n, n, |a, k| self.columns[(atoms[a], k)]);
        sub.determinant().powi(2)
    }

    /// Atom indices of one sample, in the order they were drawn.
    pub fn sample_atoms(&self, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
        let mut w = self.columns.clone();
        let mut density = self.inclusion_probabilities();
        let mut picked = Vec::with_capacity(self.rank());
        for remaining in (1..=self.rank()).rev() {
            for (i, d) in density.iter_mut().enumerate() {
                if *d < 0.0 {
                    if *d < DENSITY_FLOOR {
                        return Err(Error::Numerical(format!(
                            "conditional density {d:e} at atom {i} with {remaining} points left"
                        )));
                    }
                    *d = 0.0;
                }
            }
            let total: f64 = density.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Numerical(format!("no conditional mass left with {remaining} points to place")));
            }
            let mut target = rng.random::<f64>() * total;
            let mut choice = density.len() - 1;
            for (i, &d) in density.iter().enumerate() {
                if target < d {
                    choice = i;
                    break;
                }
                target -= d;
            }
            while density[choice] == 0.0 {
                choice -= 1;
            }
            picked.push(choice);
            // deflate: remove the kernel column of the chosen atom
            let row = w.row(choice).transpose();
            let unit = &row / row.norm();
            let u = &w * &unit;
            w -= &u * unit.transpose();
            for (d, ui) in density.iter_mut().zip(u.iter()) {
                *d -= ui * ui;
            }
            density[choice] = 0.0;
        }
        Ok(picked)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Configuration> {
        let atoms = self.sample_atoms(rng)?;
        Ok(Configuration::new(atoms.iter().map(|&i| self.grid.nodes[i]).collect()))
    }

    /// `count` samples, sample `k` drawn from substream `k`; the result does
    /// not depend on the number of threads.
    pub fn sample_many(&self, count: usize, rng: &RngState) -> Result<Vec<Configuration>> {
        (0..count)
            .into_par_iter()
            .map(|k| self.sample(&mut rng.stream(k as u64)))
            .collect()
    }

    /// Atom-index form of `sample_many`, for enumeration checks.
    pub fn sample_many_atoms(&self, count: usize, rng: &RngState) -> Result<Vec<Vec<usize>>> {
        (0..count)
            .into_par_iter()
            .map(|k| {
                let mut a = self.sample_atoms(&mut rng.stream(k as u64))?;
                a.sort_unstable();
                Ok(a)
            })
            .collect()
    }

    /// Expected number of points in each bin `[edges[b], edges[b+1])`.
    pub fn theory_intensity(&self, edges: &[f64]) -> Vec<f64> {
        let p = self.inclusion_probabilities();
        let mut out = vec![0.0; edges.len().saturating_sub(1)];
        for (&x, &pi) in self.grid.nodes.iter().zip(&p) {
            if let Some(b) = bin_of(edges, x) {
                out[b] += pi;
            }
        }
        out
    }

    /// `E prod g(x_i) = det(I - V' diag(1 - g) V)`.
    pub fn expected_multiplicative<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let n = self.rank();
        let one_minus: Vec<f64> = self.grid.nodes.iter().map(|&x| 1.0 - g(x)).collect();
        let mut m = DMatrix::<f64>::identity(n, n);
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..self.grid.len())
                    .map(|i| self.columns[(i, a)] * one_minus[i] * self.columns[(i, b)])
                    .sum();
                m[(a, b)] -= s;
            }
        }
        m.determinant()
    }
}

/// Convenience wrapper: one sample from the DPP of an orthonormal basis.
pub fn sample_dpp(basis: &SubspaceBasis, rng: &mut ChaCha8Rng) -> Result<Configuration> {
    DppSampler::new(basis)?.sample(rng)
}

pub(crate) fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    if edges.len() < 2 || x < edges[0] || x >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|&e| e <= x) - 1)
}
