//! Neighbor-distance densities for isotropic vector distributions, the
//! matching samplers, and the mode-normalized curves used to compare how
//! sharply neighbor counts rise with the radius.
//!
//! Densities are unnormalized; curves on a grid are normalized numerically
//! with the trapezoid rule. Everything is evaluated in log space first so
//! large dimensions neither overflow nor underflow before rescaling.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::seed;

/// Grid size for argmax and normalization.
pub const DEFAULT_GRID_POINTS: usize = 20_001;

/// Log of the unnormalized distance density between two independent
/// uniform points on the unit sphere in `R^d`.
///
/// `r^(d-1) (1 - r²/4)^((d-2)/2) / sqrt(4 - (2 - r²)²)`, evaluated as
/// `r^(d-2) (1 - r²/4)^((d-2)/2) (4 - r²)^(-1/2)` since
/// `4 - (2 - r²)² = r² (4 - r²)`.
pub fn log_density_uniform_sphere(r: f64, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::invalid(format!("dimension {d} must be at least 3")));
    }
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::invalid(format!("radius {r} outside (0, 2)")));
    }
    let k = (d - 2) as f64;
    Ok(k * r.ln() + 0.5 * k * (1.0 - r * r / 4.0).ln() - 0.5 * (4.0 - r * r).ln())
}

pub fn density_uniform_sphere(r: f64, d: usize) -> Result<f64> {
    log_density_uniform_sphere(r, d).map(f64::exp)
}

/// Log of the unnormalized distance density between two independent
/// `N(0, Id/2)` vectors: `r^(d-1) exp(-r²/2)`.
pub fn log_density_gaussian(r: f64, d: usize) -> Result<f64> {
    if d < 1 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("radius {r} must be positive")));
    }
    Ok((d - 1) as f64 * r.ln() - 0.5 * r * r)
}

pub fn density_gaussian(r: f64, d: usize) -> Result<f64> {
    log_density_gaussian(r, d).map(f64::exp)
}

/// Density sampled on an ascending grid of distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve {
    pub r_values: Vec<f64>,
    pub density: Vec<f64>,
    pub normalized: bool,
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

impl DensityCurve {
    pub fn new(r_values: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if r_values.len() != density.len() || r_values.len() < 2 {
            return Err(Error::invalid("curve needs at least two points of matching length"));
        }
        if r_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("r values must be strictly ascending"));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("densities must be finite and non-negative"));
        }
        Ok(Self {
            r_values,
            density,
            normalized: false,
        })
    }

    /// Builds a curve from log densities, rescaled so the maximum is 1.
    fn from_log(r_values: Vec<f64>, log_density: Vec<f64>) -> Result<Self> {
        let max = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let density = log_density.iter().map(|l| (l - max).exp()).collect();
        Self::new(r_values, density)
    }

    /// Uniform-sphere density on `points` evenly spaced radii strictly inside
    /// `(0, 2)`, normalized.
    pub fn uniform_sphere(d: usize, points: usize) -> Result<Self> {
        let step = 2.0 / (points + 1) as f64;
        let r: Vec<f64> = (1..=points).map(|i| i as f64 * step).collect();
        let logs = r
            .iter()
            .map(|&x| log_density_uniform_sphere(x, d))
            .collect::<Result<Vec<_>>>()?;
        Self::from_log(r, logs)?.normalize()
    }

    /// Gaussian-pair density on `points` evenly spaced radii in
    /// `(0, r_max]`, normalized.
    pub fn gaussian(d: usize, points: usize, r_max: f64) -> Result<Self> {
        let step = r_max / points as f64;
        let r: Vec<f64> = (1..=points).map(|i| i as f64 * step).collect();
        let logs = r
            .iter()
            .map(|&x| log_density_gaussian(x, d))
            .collect::<Result<Vec<_>>>()?;
        Self::from_log(r, logs)?.normalize()
    }

    /// Gaussian curve on a default support wide enough to hold all but a
    /// negligible tail.
    pub fn gaussian_default(d: usize) -> Result<Self> {
        Self::gaussian(d, DEFAULT_GRID_POINTS, (d as f64).sqrt() + 10.0)
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.r_values, &self.density)
    }

    /// Scales the density so its trapezoid integral is 1.
    pub fn normalize(mut self) -> Result<Self> {
        let area = self.integral();
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::invalid("curve has zero or non-finite area"));
        }
        for d in &mut self.density {
            *d /= area;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Index of the grid maximum (first one on ties).
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (i, d) in self.density.iter().enumerate() {
            if *d > self.density[best] {
                best = i;
            }
        }
        best
    }

    pub fn mode(&self) -> f64 {
        self.r_values[self.argmax_index()]
    }

    /// Full width at half maximum, with linear interpolation at both
    /// crossings.
    pub fn fwhm(&self) -> f64 {
        let i = self.argmax_index();
        let half = self.density[i] / 2.0;
        let (r, d) = (&self.r_values, &self.density);
        let mut left = r[0];
        for j in (0..i).rev() {
            if d[j] <= half {
                left = r[j] + (half - d[j]) / (d[j + 1] - d[j]) * (r[j + 1] - r[j]);
                break;
            }
        }
        let mut right = r[r.len() - 1];
        for j in i + 1..r.len() {
            if d[j] <= half {
                right = r[j - 1] + (d[j - 1] - half) / (d[j - 1] - d[j]) * (r[j] - r[j - 1]);
                break;
            }
        }
        right - left
    }
}

/// Rescales the r axis so the grid mode lands on 1, then renormalizes.
pub fn mode_normalize(curve: &DensityCurve) -> Result<DensityCurve> {
    let i = curve.argmax_index();
    if i == 0 || i + 1 == curve.r_values.len() {
        return Err(Error::invalid("curve maximum lies on the grid boundary"));
    }
    let mode = curve.r_values[i];
    let r_values = curve.r_values.iter().map(|r| r / mode).collect();
    let density = curve.density.iter().map(|d| d * mode).collect();
    DensityCurve::new(r_values, density)?.normalize()
}

/// `n` i.i.d. rows from `N(0, Id/2)`, so that the difference of two rows is
/// standard normal.
pub fn sample_gaussian(n: usize, d: usize, seed_root: u64) -> Result<VectorDataset> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("n and d must be positive"));
    }
    let mut rng = seed::rng(seed_root, seed::stage::SAMPLE, 0);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..n * d)
        .map(|_| (rng.sample::<f64, _>(StandardNormal) * scale) as f32)
        .collect();
    VectorDataset::new(d, data)
}

/// `n` i.i.d. rows uniform on the unit sphere (normalized Gaussian draws).
pub fn sample_uniform_sphere(n: usize, d: usize, seed_root: u64) -> Result<VectorDataset> {
    if n == 0 || d < 2 {
        return Err(Error::invalid("need n >= 1 and d >= 2"));
    }
    let mut rng = seed::rng(seed_root, seed::stage::SAMPLE, 1);
    let mut data = Vec::with_capacity(n * d);
    let mut row = vec![0f64; d];
    for _ in 0..n {
        loop {
            for x in row.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                data.extend(row.iter().map(|x| (x / norm) as f32));
                break;
            }
        }
    }
    VectorDataset::new(d, data)
}

/// Equal-width histogram of pairwise distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DistanceHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin-center curve whose densities integrate to 1 under the
    /// rectangle rule (`Σ density × bin width = 1`).
    pub fn density_curve(&self) -> DensityCurve {
        let total = self.total().max(1) as f64;
        let mut r_values = Vec::with_capacity(self.counts.len());
        let mut density = Vec::with_capacity(self.counts.len());
        for (i, &c) in self.counts.iter().enumerate() {
            let w = self.edges[i + 1] - self.edges[i];
            r_values.push(0.5 * (self.edges[i] + self.edges[i + 1]));
            density.push(c as f64 / (total * w));
        }
        DensityCurve {
            r_values,
            density,
            normalized: true,
        }
    }
}

/// Histogram of distances (not squared) over all `queries × db` pairs, with
/// `bins` equal-width bins spanning the observed range. When every
/// distance is equal the whole mass goes to the first bin.
pub fn empirical_distance_histogram(
    queries: &VectorDataset,
    db: &VectorDataset,
    bins: usize,
) -> Result<DistanceHistogram> {
    queries.check_dim(db)?;
    if bins < 2 {
        return Err(Error::invalid("need at least 2 bins"));
    }
    let mut dists = Vec::with_capacity(queries.len() * db.len());
    for q in queries.rows() {
        for x in db.rows() {
            dists.push(l2sq(q, x).sqrt());
        }
    }
    histogram(&dists, bins)
}

/// Same as [`empirical_distance_histogram`] for distances already computed.
pub fn histogram(dists: &[f64], bins: usize) -> Result<DistanceHistogram> {
    if bins < 2 {
        return Err(Error::invalid("need at least 2 bins"));
    }
    if dists.is_empty() {
        return Err(Error::invalid("no distances to histogram"));
    }
    let lo = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &x in dists {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(DistanceHistogram { edges, counts })
}
