//! Dense vector storage and exact squared-L2 distances.

use crate::error::{Error, Result};
use crate::seed;

/// Row-major matrix of `len × dim` finite `f32` values. Row `i` has id `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorDataset {
    dim: usize,
    data: Vec<f32>,
}

impl VectorDataset {
    pub fn new(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if data.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "data length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn from_rows<R: AsRef<[f32]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows.
    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// Copies the listed rows, in the given order, into a new dataset.
    pub fn select(&self, ids: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for &id in ids {
            if id >= self.len() {
                return Err(Error::IdOutOfRange {
                    what: "row",
                    id: id as u64,
                    len: self.len(),
                });
            }
            data.extend_from_slice(self.row(id));
        }
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// `n` distinct rows drawn without replacement, kept in ascending id
    /// order. Returns a copy of every row when `n >= len`.
    pub fn subsample(&self, n: usize, seed_root: u64) -> Result<Self> {
        if n >= self.len() {
            return Ok(self.clone());
        }
        let mut rng = seed::rng(seed_root, seed::stage::SUBSAMPLE, 0);
        let mut ids = rand::seq::index::sample(&mut rng, self.len(), n).into_vec();
        ids.sort_unstable();
        self.select(&ids)
    }

    /// Contiguous rows `start..end`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.len() {
            return Err(Error::invalid(format!(
                "row range {start}..{end} out of bounds for {} rows",
                self.len()
            )));
        }
        Ok(Self {
            dim: self.dim,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
        })
    }

    /// The columns `start..start + width` of every row.
    pub fn columns(&self, start: usize, width: usize) -> Result<Self> {
        if width == 0 || start + width > self.dim {
            return Err(Error::invalid(format!(
                "column range {start}..{} out of bounds for dimension {}",
                start + width,
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(self.len() * width);
        for row in self.rows() {
            data.extend_from_slice(&row[start..start + width]);
        }
        Ok(Self { dim: width, data })
    }

    pub(crate) fn check_dim(&self, other: &VectorDataset) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Squared Euclidean distance.
pub fn squared_l2(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(l2sq(a, b))
}

/// Unchecked kernel behind [`squared_l2`]. Sixteen `f32` lanes accumulate
/// independently and are summed in `f64` in a fixed order, so results do not
/// depend on the caller or on the SIMD width the compiler picks.
#[inline]
pub(crate) fn l2sq(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    const LANES: usize = 16;
    let mut acc = [0f32; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        let x: &[f32; LANES] = x.try_into().unwrap();
        let y: &[f32; LANES] = y.try_into().unwrap();
        for i in 0..LANES {
            let d = x[i] - y[i];
            acc[i] += d * d;
        }
    }
    let mut tail = 0f64;
    for (x, y) in ra.iter().zip(rb) {
        let d = *x as f64 - *y as f64;
        tail += d * d;
    }
    let mut total = 0f64;
    for pair in acc.chunks_exact(2) {
        total += pair[0] as f64 + pair[1] as f64;
    }
    total + tail
}

pub(crate) fn l2_norm(a: &[f32]) -> f64 {
    a.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subsample_is_seeded_sorted_and_distinct() {
        let ds = VectorDataset::new(1, (0..100).map(|i| i as f32).collect()).unwrap();
        let a = ds.subsample(10, 3).unwrap();
        assert_eq!(a, ds.subsample(10, 3).unwrap());
        assert_ne!(a, ds.subsample(10, 4).unwrap());
        let v = a.as_slice();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ds.subsample(100, 3).unwrap(), ds);
    }

    #[test]
    fn squared_l2_examples() {
        assert_eq!(squared_l2(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(squared_l2(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert_eq!(squared_l2(&[1.0, 2.0, 3.0], &[4.0, 6.0, 3.0]).unwrap(), 25.0);
    }

    #[test]
    fn squared_l2_rejects_mismatch() {
        assert!(matches!(
            squared_l2(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn dataset_validation() {
        assert!(VectorDataset::new(0, vec![]).is_err());
        assert!(VectorDataset::new(3, vec![1.0; 4]).is_err());
        assert!(VectorDataset::new(2, vec![1.0, f32::NAN]).is_err());
        assert!(VectorDataset::new(2, vec![f32::INFINITY, 0.0]).is_err());
        let ds = VectorDataset::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.row(1), &[3.0, 4.0]);
        assert_eq!(VectorDataset::empty(4).unwrap().len(), 0);
    }

    #[test]
    fn select_and_columns() {
        let ds = VectorDataset::new(3, (0..9).map(|x| x as f32).collect()).unwrap();
        let s = ds.select(&[2, 0]).unwrap();
        assert_eq!(s.as_slice(), &[6.0, 7.0, 8.0, 0.0, 1.0, 2.0]);
        let c = ds.columns(1, 2).unwrap();
        assert_eq!(c.row(2), &[7.0, 8.0]);
        assert!(ds.select(&[3]).is_err());
        assert!(ds.columns(2, 2).is_err());
    }

    fn vec3(n: usize) -> impl Strategy<Value = Vec<f32>> {
        proptest::collection::vec(-10.0f32..10.0, n)
    }

    proptest! {
        #[test]
        fn symmetric_and_zero_iff_equal(a in vec3(7), b in vec3(7)) {
            let ab = squared_l2(&a, &b).unwrap();
            prop_assert_eq!(ab, squared_l2(&b, &a).unwrap());
            prop_assert_eq!(squared_l2(&a, &a).unwrap(), 0.0);
            if a != b {
                prop_assert!(ab > 0.0);
            }
        }

        #[test]
        fn parallelogram_identity(a in vec3(9), b in vec3(9), c in vec3(9)) {
            // with u = a - c, v = b - c: |u-v|^2 + |u+v|^2 = 2|u|^2 + 2|v|^2
            let zero = vec![0f32; 9];
            let u: Vec<f32> = a.iter().zip(&c).map(|(x, y)| x - y).collect();
            let v: Vec<f32> = b.iter().zip(&c).map(|(x, y)| x - y).collect();
            let upv: Vec<f32> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
            let lhs = squared_l2(&u, &v).unwrap() + squared_l2(&upv, &zero).unwrap();
            let rhs = 2.0 * squared_l2(&u, &zero).unwrap() + 2.0 * squared_l2(&v, &zero).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-4 * rhs.max(1e-6));
        }
    }
}
