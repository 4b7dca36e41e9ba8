//! Projection DPP sampling on grid atoms, Haar unitaries and orbital
//! averages, and sample statistics.

mod dpp;
mod haar;

pub use dpp::{sample_dpp, DppSampler};
pub use haar::{ginibre, orbital_average, radial_point, real_inner, sample_haar_unitary, CMatrix};

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::io::Write;

/// A finite point configuration, stored in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    pub points: Vec<f64>,
}

impl Configuration {
    pub fn new(mut points: Vec<f64>) -> Self {
        points.sort_by(|a, b| a.total_cmp(b));
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Seed plus substream selection. Substream `k` is the ChaCha8 stream `k`
/// under the seed, so parallel work indexed by `k` is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngState {
    pub seed: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub mean: T,
    pub stderr: f64,
    pub count: usize,
}

impl Estimate<f64> {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = neumaier_sum(values.iter().copied()) / n as f64;
        let var = if n > 1 {
            neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1) as f64
        } else {
            0.0
        };
        Self { mean, stderr: (var / n as f64).sqrt(), count: n }
    }

    /// Whether `value` lies within `k` standard errors.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

impl Estimate<Complex64> {
    /// Standard error of the complex mean, `sqrt(E|v - mean|^2 / n)`.
    pub fn from_complex(values: &[Complex64]) -> Self {
        let n = values.len();
        let re = neumaier_sum(values.iter().map(|v| v.re)) / n as f64;
        let im = neumaier_sum(values.iter().map(|v| v.im)) / n as f64;
        let mean = Complex64::new(re, im);
        let var = if n > 1 {
            neumaier_sum(values.iter().map(|v| (v - mean).norm_sqr())) / (n - 1) as f64
        } else {
            0.0
        };
        Self { mean, stderr: (var / n as f64).sqrt(), count: n }
    }
}

/// Compensated sum; the result does not depend on how the values were produced.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub mean_count: f64,
    pub stderr: f64,
    pub theory: Option<f64>,
}

impl Bin {
    /// `|mean - theory| <= k * stderr`; bins without a theory value never pass.
    pub fn within(&self, k: f64) -> bool {
        match self.theory {
            Some(t) => (self.mean_count - t).abs() <= k * self.stderr,
            None => false,
        }
    }
}

/// Per-bin mean counts over `samples` for bins `[edges[b], edges[b+1])`.
pub fn empirical_intensity(samples: &[Configuration], edges: &[f64]) -> Result<Vec<Bin>> {
    if samples.is_empty() {
        return Err(Error::Usage("empirical_intensity needs at least one sample".into()));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Usage("bin edges must be increasing and at least two".into()));
    }
    let nb = edges.len() - 1;
    let mut counts = vec![vec![0.0f64; samples.len()]; nb];
    for (k, c) in samples.iter().enumerate() {
        for &x in &c.points {
            if let Some(b) = dpp::bin_of(edges, x) {
                counts[b][k] += 1.0;
            }
        }
    }
    Ok((0..nb)
        .map(|b| {
            let e = Estimate::from_values(&counts[b]);
            Bin { lo: edges[b], hi: edges[b + 1], mean_count: e.mean, stderr: e.stderr, theory: None }
        })
        .collect())
}

/// Mean over samples of `prod_i g(x_i)`; `g` must take values in `(0, 1]`.
pub fn laplace_functional<F: Fn(f64) -> f64>(samples: &[Configuration], g: F) -> Result<Estimate<f64>> {
    if samples.is_empty() {
        return Err(Error::Usage("laplace_functional needs at least one sample".into()));
    }
    let mut values = Vec::with_capacity(samples.len());
    for c in samples {
        let mut prod = 1.0;
        for &x in &c.points {
            let v = g(x);
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Usage(format!("g({x}) = {v} lies outside (0, 1]")));
            }
            prod *= v;
        }
        values.push(prod);
    }
    Ok(Estimate::from_values(&values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub cells: usize,
}

/// Pearson test of sampled atom sets against the exact subset probabilities
/// `det(V_S)^2`, enumerating every subset of the sampler's rank.
pub fn enumeration_chi_square(sampler: &DppSampler, samples: &[Vec<usize>]) -> Result<ChiSquareReport> {
    let m = sampler.grid().len();
    let r = sampler.rank();
    if m > 24 {
        return Err(Error::Usage(format!("enumeration over {m} atoms is too large")));
    }
    if samples.is_empty() {
        return Err(Error::Usage("chi-square test needs samples".into()));
    }
    let subsets = combinations(m, r);
    let total = samples.len() as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    let mut seen = 0usize;
    for s in &subsets {
        let expected = sampler.subset_probability(s) * total;
        let observed = samples.iter().filter(|x| x.as_slice() == s.as_slice()).count();
        seen += observed;
        if expected > 0.0 {
            statistic += (observed as f64 - expected).powi(2) / expected;
            cells += 1;
        } else if observed > 0 {
            return Err(Error::Numerical(format!("sampled the impossible atom set {s:?}")));
        }
    }
    if seen != samples.len() {
        return Err(Error::Usage("samples contain sets of the wrong size".into()));
    }
    let dof = cells.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(ChiSquareReport { statistic, dof, p_value: 1.0 - dist.cdf(statistic), cells })
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, r, cur, out);
            cur.pop();
        }
    }
    rec(0, m, r, &mut cur, &mut out);
    out
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// `sample_id,point`, one row per point.
pub fn write_samples_csv<W: Write>(samples: &[Configuration], mut out: W) -> Result<()> {
    writeln!(out, "sample_id,point")?;
    for (k, c) in samples.iter().enumerate() {
        for &x in &c.points {
            writeln!(out, "{k},{}", fmt(x))?;
        }
    }
    Ok(())
}

/// `bin_lo,bin_hi,mean_count,stderr,theory`; a missing theory value is left empty.
pub fn write_histogram_csv<W: Write>(bins: &[Bin], mut out: W) -> Result<()> {
    writeln!(out, "bin_lo,bin_hi,mean_count,stderr,theory")?;
    for b in bins {
        let theory = b.theory.map(fmt).unwrap_or_default();
        writeln!(out, "{},{},{},{},{theory}", fmt(b.lo), fmt(b.hi), fmt(b.mean_count), fmt(b.stderr))?;
    }
    Ok(())
}
