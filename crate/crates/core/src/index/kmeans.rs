//! Lloyd k-means with k-means++ seeding.

use rand::Rng;

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::par;
use crate::seed;

/// Cluster centers; row `i` is centroid `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Centroids {
    vectors: VectorDataset,
}

impl Centroids {
    pub fn new(vectors: VectorDataset) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("need at least one centroid"));
        }
        Ok(Self { vectors })
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn vectors(&self) -> &VectorDataset {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &[f32] {
        self.vectors.row(i)
    }

    /// Nearest centroid (ties to the smaller id) and its squared distance.
    pub fn nearest(&self, x: &[f32]) -> (u32, f64) {
        let mut best = (0u32, f64::INFINITY);
        for (i, c) in self.vectors.rows().enumerate() {
            let d = l2sq(x, c);
            if d < best.1 {
                best = (i as u32, d);
            }
        }
        best
    }

    /// Nearest centroid of every row.
    pub fn assign(&self, data: &VectorDataset) -> Vec<(u32, f64)> {
        par::map_range(data.len(), |i| self.nearest(data.row(i)))
    }

    /// Every row minus its nearest centroid.
    pub fn residuals(&self, data: &VectorDataset) -> Result<VectorDataset> {
        if data.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: data.dim(),
            });
        }
        let mut out = Vec::with_capacity(data.as_slice().len());
        for (x, (c, _)) in data.rows().zip(self.assign(data)) {
            out.extend(x.iter().zip(self.get(c as usize)).map(|(a, b)| a - b));
        }
        VectorDataset::new(data.dim(), out)
    }
}

#[derive(Clone, Debug)]
pub struct KMeans {
    pub centroids: Centroids,
    /// Inertia after seeding, then after each Lloyd iteration.
    pub inertia_history: Vec<f64>,
}

impl KMeans {
    pub fn inertia(&self) -> f64 {
        *self.inertia_history.last().unwrap()
    }
}

fn kmeans_pp(data: &VectorDataset, k: usize, rng: &mut impl Rng) -> Vec<f32> {
    let n = data.len();
    let d = data.dim();
    let mut centers = Vec::with_capacity(k * d);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(data.row(first));
    let mut closest: Vec<f64> = par::map_range(n, |i| l2sq(data.row(i), data.row(first)));
    for c in 1..k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in closest.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            // every point already coincides with a center
            rng.random_range(0..n)
        };
        centers.extend_from_slice(data.row(pick));
        let new_center = &centers[c * d..(c + 1) * d];
        let updated = par::map_range(n, |i| closest[i].min(l2sq(data.row(i), new_center)));
        closest = updated;
    }
    centers
}

/// Runs `iters` Lloyd iterations from a k-means++ seeding.
///
/// Empty clusters are re-seeded by splitting the largest cluster: the empty
/// centroid moves onto that cluster's member farthest from its center.
/// No existing centroid moves during a re-seed, so inertia never increases.
pub fn train_kmeans(data: &VectorDataset, k: usize, iters: usize, seed_root: u64) -> Result<KMeans> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if data.len() < k {
        return Err(Error::invalid(format!(
            "cannot train {k} centroids on {} points",
            data.len()
        )));
    }
    let d = data.dim();
    let n = data.len();
    let mut rng = seed::rng(seed_root, seed::stage::KMEANS, k as u64);
    let mut centers = VectorDataset::new(d, kmeans_pp(data, k, &mut rng))?;

    let mut assign = Centroids::new(centers.clone())?.assign(data);
    let mut history = vec![assign.iter().map(|a| a.1).sum::<f64>()];

    for _ in 0..iters {
        let mut sums = vec![0f64; k * d];
        let mut counts = vec![0usize; k];
        for (i, &(c, _)) in assign.iter().enumerate() {
            let c = c as usize;
            counts[c] += 1;
            for (s, &x) in sums[c * d..(c + 1) * d].iter_mut().zip(data.row(i)) {
                *s += x as f64;
            }
        }
        let mut next = centers.clone().into_vec();
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    next[c * d + j] = (sums[c * d + j] / counts[c] as f64) as f32;
                }
            }
        }

        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let largest = (0..k).max_by_key(|&j| (counts[j], std::cmp::Reverse(j))).unwrap();
            if counts[largest] < 2 {
                break;
            }
            let center = next[largest * d..(largest + 1) * d].to_vec();
            let far = (0..n)
                .filter(|&i| assign[i].0 as usize == largest)
                .max_by(|&a, &b| {
                    l2sq(data.row(a), &center)
                        .total_cmp(&l2sq(data.row(b), &center))
                        .then(b.cmp(&a))
                })
                .unwrap();
            next[c * d..(c + 1) * d].copy_from_slice(data.row(far));
            counts[largest] -= 1;
            counts[c] = 1;
            assign[far].0 = c as u32;
        }

        centers = VectorDataset::new(d, next)?;
        assign = Centroids::new(centers.clone())?.assign(data);
        history.push(assign.iter().map(|a| a.1).sum::<f64>());
    }

    Ok(KMeans {
        centroids: Centroids::new(centers)?,
        inertia_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::StandardNormal;

    fn blobs(n_per: usize, means: &[[f32; 2]], noise: f32, seed_root: u64) -> VectorDataset {
        let mut rng = seed::rng(seed_root, 99, 0);
        let mut data = Vec::new();
        for m in means {
            for _ in 0..n_per {
                for &mu in m {
                    data.push(mu + noise * rng.sample::<f32, _>(StandardNormal));
                }
            }
        }
        VectorDataset::new(2, data).unwrap()
    }

    #[test]
    fn k_equals_count_reproduces_points() {
        let data = VectorDataset::new(2, vec![0.0, 0.0, 5.0, 1.0, -3.0, 2.0]).unwrap();
        let km = train_kmeans(&data, 3, 10, 1).unwrap();
        assert_eq!(km.inertia(), 0.0);
        let mut got: Vec<Vec<f32>> = km.centroids.vectors().rows().map(|r| r.to_vec()).collect();
        got.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(got, vec![vec![-3.0, 2.0], vec![0.0, 0.0], vec![5.0, 1.0]]);
    }

    #[test]
    fn residuals_subtract_the_nearest_centroid() {
        let c = Centroids::new(VectorDataset::new(2, vec![0.0, 0.0, 10.0, 10.0]).unwrap()).unwrap();
        let data = VectorDataset::new(2, vec![1.0, -1.0, 9.0, 12.0]).unwrap();
        assert_eq!(c.residuals(&data).unwrap().as_slice(), &[1.0, -1.0, -1.0, 2.0]);
        assert!(c.residuals(&VectorDataset::new(1, vec![0.0]).unwrap()).is_err());
    }

    #[test]
    fn separated_blobs_recover_means() {
        let means = [[0.0f32, 0.0], [20.0, 20.0]];
        let data = blobs(200, &means, 0.5, 3);
        let km = train_kmeans(&data, 2, 20, 7).unwrap();
        for m in &means {
            let (_, d2) = km.centroids.nearest(m);
            assert!(d2.sqrt() < 0.1, "centroid {} away from blob mean", d2.sqrt());
        }
    }

    #[test]
    fn inertia_never_increases() {
        let data = blobs(100, &[[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [5.0, 5.0]], 1.0, 5);
        let km = train_kmeans(&data, 9, 15, 2).unwrap();
        assert_eq!(km.inertia_history.len(), 16);
        for w in km.inertia_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} -> {}", w[0], w[1]);
        }
        assert!(km.inertia() <= km.inertia_history[0]);
    }

    #[test]
    fn duplicate_points_leave_no_empty_clusters_behind() {
        // four distinct points, many duplicates, k = 4
        let mut rows = Vec::new();
        for i in 0..40 {
            rows.push([(i % 4) as f32 * 10.0, 0.0]);
        }
        let data = VectorDataset::from_rows(2, &rows).unwrap();
        let km = train_kmeans(&data, 4, 10, 11).unwrap();
        assert_eq!(km.inertia(), 0.0);
    }

    #[test]
    fn deterministic_and_errors() {
        let data = blobs(50, &[[0.0, 0.0], [4.0, 4.0]], 1.0, 1);
        let a = train_kmeans(&data, 5, 5, 42).unwrap();
        let b = train_kmeans(&data, 5, 5, 42).unwrap();
        assert_eq!(a.centroids, b.centroids);
        assert!(train_kmeans(&data, 101, 5, 1).is_err());
        assert!(train_kmeans(&data, 0, 5, 1).is_err());
    }
}
