use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Nodes and positive weights of a composite rule on `interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub interval: (T, T),
    /// Panel boundaries, `breaks[0] = a`, last = `b`.
    pub breaks: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// Indices of nodes inside `[lo, hi]`.
    pub fn indices_within(&self, lo: T, hi: T) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.nodes[i] >= lo && self.nodes[i] <= hi)
            .collect()
    }

    /// Join two grids on adjacent intervals (`self.b == other.a`).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.interval.1 != other.interval.0 {
            return Err(Error::Usage("grids are not adjacent".into()));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        let mut breaks = self.breaks.clone();
        breaks.extend_from_slice(&other.breaks[1..]);
        Ok(Self {
            nodes,
            weights,
            interval: (self.interval.0, other.interval.1),
            breaks,
        })
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.weights == other.weights
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, increasing.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        // Tricomi initial guess, then Newton
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(k, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(k, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    if k % 2 == 1 {
        x[k / 2] = 0.0;
    }
    (x, w)
}

fn legendre_and_derivative(k: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let kf = k as f64;
    let d = kf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn composite<T: Real>(breaks: Vec<T>, k: usize) -> QuadratureGrid<T> {
    let (x, w) = gauss_legendre(k);
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * k);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let half = (pair[1] - pair[0]) / T::lit(2.0);
        let mid = (pair[1] + pair[0]) / T::lit(2.0);
        for (&xi, &wi) in x.iter().zip(&w) {
            nodes.push(mid + half * T::lit(xi));
            weights.push(half * T::lit(wi));
        }
    }
    let interval = (breaks[0], *breaks.last().unwrap());
    QuadratureGrid {
        nodes,
        weights,
        interval,
        breaks,
    }
}

/// Composite Gauss-Legendre with `m` equal panels of `k` points on `[a, b]`.
pub fn legendre_grid<T: Real>(m: usize, k: usize, a: T, b: T) -> Result<QuadratureGrid<T>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("legendre_grid needs finite a < b, got [{a}, {b}]")));
    }
    if m < 1 || k < 2 {
        return Err(domain("legendre_grid needs m >= 1 panels and k >= 2 points"));
    }
    let breaks = (0..=m)
        .map(|i| {
            if i == m {
                b
            } else {
                a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(m)
            }
        })
        .collect();
    Ok(composite(breaks, k))
}

/// Geometric composite grid on `[x_min, x_max]` with `panels_per_decade` panels per factor of ten.
pub fn halfline_grid<T: Real>(
    x_min: T,
    x_max: T,
    panels_per_decade: usize,
    k: usize,
) -> Result<QuadratureGrid<T>> {
    if !(x_min > T::zero()) || !(x_min < x_max) || !x_max.is_finite() {
        return Err(domain(format!(
            "halfline_grid needs 0 < x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    if panels_per_decade < 1 || k < 2 {
        return Err(domain("halfline_grid needs at least one panel per decade and k >= 2"));
    }
    let decades = (x_max / x_min).log10();
    let m = (decades * T::from_usize_lossy(panels_per_decade))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let ratio = (x_max / x_min).ln() / T::from_usize_lossy(m);
    let breaks = (0..=m)
        .map(|i| {
            if i == m {
                x_max
            } else {
                x_min * (ratio * T::from_usize_lossy(i)).exp()
            }
        })
        .collect();
    Ok(composite(breaks, k))
}

/// Parameters of a half-line grid, written `xmin:xmax:ppd:k` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub panels_per_decade: usize,
    pub k: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: 1e-8,
            x_max: 200.0,
            panels_per_decade: 8,
            k: 16,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<QuadratureGrid<f64>> {
        halfline_grid(self.x_min, self.x_max, self.panels_per_decade, self.k)
    }

    /// Same panels with twice the points per panel.
    pub fn refined(&self) -> Self {
        Self { k: 2 * self.k, ..*self }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Usage(format!("grid must look like xmin:xmax:ppd:k, got {s:?}")));
        }
        let bad = |what: &str| Error::Usage(format!("grid {what} is not a number in {s:?}"));
        let spec = Self {
            x_min: parts[0].parse().map_err(|_| bad("xmin"))?,
            x_max: parts[1].parse().map_err(|_| bad("xmax"))?,
            panels_per_decade: parts[2].parse().map_err(|_| bad("ppd"))?,
            k: parts[3].parse().map_err(|_| bad("k"))?,
        };
        if !(spec.x_min > 0.0 && spec.x_min < spec.x_max) {
            return Err(domain(format!("grid needs 0 < xmin < xmax, got {s:?}")));
        }
        Ok(spec)
    }
}
