//! Iterative quantization: PCA followed by a learned rotation, giving binary
//! codes compared with Hamming distance.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::seed;

pub const ITQ_DEFAULT_ITERS: usize = 50;

/// Training rows beyond this are subsampled (seeded).
pub const ITQ_MAX_TRAIN: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ItqModel {
    dim: usize,
    n_bits: usize,
    mean: Vec<f64>,
    /// `dim × n_bits`, row major.
    projection: Vec<f64>,
    /// `n_bits × n_bits`, row major.
    rotation: Vec<f64>,
    /// `projection · rotation`, cached for encoding.
    combined: Vec<f64>,
}

impl ItqModel {
    pub fn new(mean: Vec<f64>, n_bits: usize, projection: Vec<f64>, rotation: Vec<f64>) -> Result<Self> {
        let dim = mean.len();
        if n_bits == 0 || n_bits % 8 != 0 {
            return Err(Error::invalid(format!("n_bits must be a positive multiple of 8, got {n_bits}")));
        }
        if n_bits > dim {
            return Err(Error::invalid(format!("n_bits {n_bits} exceeds dimension {dim}")));
        }
        if projection.len() != dim * n_bits || rotation.len() != n_bits * n_bits {
            return Err(Error::invalid("ITQ matrix shapes do not match"));
        }
        if mean.iter().chain(&projection).chain(&rotation).any(|x| !x.is_finite()) {
            return Err(Error::invalid("ITQ parameters must be finite"));
        }
        let p = DMatrix::from_row_slice(dim, n_bits, &projection);
        let r = DMatrix::from_row_slice(n_bits, n_bits, &rotation);
        let combined = row_major(&(p * r));
        Ok(Self {
            dim,
            n_bits,
            mean,
            projection,
            rotation,
            combined,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn projection(&self) -> &[f64] {
        &self.projection
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn code_size(&self) -> usize {
        self.n_bits / 8
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let r = DMatrix::from_row_slice(self.n_bits, self.n_bits, &self.rotation);
        let g = r.transpose() * &r - DMatrix::identity(self.n_bits, self.n_bits);
        g.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Bit `j` is set iff the `j`-th rotated coordinate is ≥ 0; bit `j` lives
    /// in byte `j / 8` at position `j % 8`.
    pub fn encode_into(&self, x: &[f32], out: &mut [u8]) {
        debug_assert_eq!(x.len(), self.dim);
        out.fill(0);
        let mut centered = Vec::with_capacity(self.dim);
        centered.extend(x.iter().zip(&self.mean).map(|(&v, m)| v as f64 - m));
        for j in 0..self.n_bits {
            let mut acc = 0.0;
            for (i, c) in centered.iter().enumerate() {
                acc += c * self.combined[i * self.n_bits + j];
            }
            if acc >= 0.0 {
                out[j / 8] |= 1 << (j % 8);
            }
        }
    }

    pub fn encode(&self, x: &[f32]) -> Result<Vec<u8>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = vec![0u8; self.code_size()];
        self.encode_into(x, &mut out);
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct ItqTraining {
    pub model: ItqModel,
    /// `‖sign(VR) − VR‖²` before the first iteration and after each one.
    pub loss_history: Vec<f64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn sign(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|v| if v >= 0.0 { 1.0 } else { -1.0 })
}

fn quantization_loss(v: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let vr = v * r;
    (sign(&vr) - vr).norm_squared()
}

/// Trains on at most [`ITQ_MAX_TRAIN`] rows. The rotation starts at the
/// identity, so the first loss entry is that of plain PCA signs.
pub fn train_itq(data: &VectorDataset, n_bits: usize, n_iters: usize, seed_root: u64) -> Result<ItqTraining> {
    let d = data.dim();
    if n_bits > d {
        return Err(Error::invalid(format!("n_bits {n_bits} exceeds dimension {d}")));
    }
    if n_bits == 0 || n_bits % 8 != 0 {
        return Err(Error::invalid(format!("n_bits must be a positive multiple of 8, got {n_bits}")));
    }
    if data.len() <= n_bits {
        return Err(Error::invalid(format!(
            "need more than {n_bits} training vectors, got {}",
            data.len()
        )));
    }
    let rows: Vec<usize> = if data.len() > ITQ_MAX_TRAIN {
        let mut rng = seed::rng(seed_root, seed::stage::ITQ, 0);
        let mut picked = sample(&mut rng, data.len(), ITQ_MAX_TRAIN).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..data.len()).collect()
    };
    let n = rows.len();

    let mut mean = vec![0f64; d];
    for &i in &rows {
        for (m, &x) in mean.iter_mut().zip(data.row(i)) {
            *m += x as f64;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, d, |i, j| data.row(rows[i])[j] as f64 - mean[j]);

    let cov = centered.tr_mul(&centered) / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut projection = DMatrix::zeros(d, n_bits);
    for (c, &src) in order.iter().take(n_bits).enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // fix the eigenvector sign: largest-magnitude entry positive
        let (imax, _) = col
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        projection.set_column(c, &col);
    }

    let v = &centered * &projection;
    let mut rotation = DMatrix::<f64>::identity(n_bits, n_bits);
    let mut history = vec![quantization_loss(&v, &rotation)];
    for _ in 0..n_iters {
        let b = sign(&(&v * &rotation));
        let svd = v.tr_mul(&b).svd(true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(Error::Invariant("SVD did not converge".into())),
        };
        rotation = u * vt;
        history.push(quantization_loss(&v, &rotation));
    }

    let model = ItqModel::new(mean, n_bits, row_major(&projection), row_major(&rotation))?;
    Ok(ItqTraining {
        model,
        loss_history: history,
    })
}

/// Number of differing bits.
#[inline]
pub fn hamming(a: &[u8], b: &[u8]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    let mut total = 0;
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        let x = u64::from_le_bytes(x.try_into().unwrap());
        let y = u64::from_le_bytes(y.try_into().unwrap());
        total += (x ^ y).count_ones();
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        total += (x ^ y).count_ones();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::sample_gaussian;
    use proptest::prelude::*;

    #[test]
    fn trained_rotation_is_orthogonal_and_loss_descends() {
        let data = sample_gaussian(3000, 32, 4).unwrap();
        let t = train_itq(&data, 16, ITQ_DEFAULT_ITERS, 1).unwrap();
        assert!(t.model.orthogonality_error() < 1e-5);
        assert_eq!(t.loss_history.len(), ITQ_DEFAULT_ITERS + 1);
        assert!(t.loss_history[ITQ_DEFAULT_ITERS] <= t.loss_history[0]);
        for w in t.loss_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn pca_captures_dominant_axis() {
        // one stretched axis: the first bit must follow its sign
        let mut data = sample_gaussian(2000, 8, 2).unwrap().into_vec();
        for row in data.chunks_exact_mut(8) {
            row[3] *= 20.0;
        }
        let data = VectorDataset::new(8, data).unwrap();
        let t = train_itq(&data, 8, 0, 1).unwrap();
        let mut pos = vec![0f32; 8];
        pos[3] = 50.0;
        let mut neg = vec![0f32; 8];
        neg[3] = -50.0;
        let (a, b) = (t.model.encode(&pos).unwrap(), t.model.encode(&neg).unwrap());
        assert_eq!(a[0] & 1, 1);
        assert_eq!(b[0] & 1, 0);
    }

    #[test]
    fn deterministic_encoding() {
        let data = sample_gaussian(500, 16, 9).unwrap();
        let a = train_itq(&data, 8, 10, 3).unwrap().model;
        let b = train_itq(&data, 8, 10, 3).unwrap().model;
        assert_eq!(a, b);
        assert_eq!(a.encode(data.row(0)).unwrap(), b.encode(data.row(0)).unwrap());
        assert_eq!(a.code_size(), 1);
    }

    #[test]
    fn errors() {
        let data = sample_gaussian(100, 16, 1).unwrap();
        assert!(train_itq(&data, 24, 5, 1).is_err());
        assert!(train_itq(&data, 12, 5, 1).is_err());
        let few = sample_gaussian(8, 16, 1).unwrap();
        assert!(train_itq(&few, 8, 5, 1).is_err());
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&[0xff; 9], &[0x00; 9]), 72);
        assert_eq!(hamming(&[0b1010], &[0b0110]), 2);
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a in prop::collection::vec(any::<u8>(), 16),
                               b in prop::collection::vec(any::<u8>(), 16),
                               c in prop::collection::vec(any::<u8>(), 16)) {
            prop_assert_eq!(hamming(&a, &a), 0);
            prop_assert_eq!(hamming(&a, &b), hamming(&b, &a));
            prop_assert!(hamming(&a, &c) <= hamming(&a, &b) + hamming(&b, &c));
            let naive: u32 = a.iter().zip(&b).map(|(x, y)| (x ^ y).count_ones()).sum();
            prop_assert_eq!(hamming(&a, &b), naive);
        }
    }
}
