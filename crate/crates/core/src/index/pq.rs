//! Product quantization with 4- or 8-bit sub-codes and asymmetric distance
//! tables.
//!
//! Codes are packed: one byte per sub-quantizer at 8 bits, two
//! sub-quantizers per byte at 4 bits (even index in the low nibble).

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::index::kmeans::train_kmeans;
use crate::seed;

/// Lloyd iterations per sub-quantizer.
pub const PQ_TRAIN_ITERS: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct PqCodebook {
    dim: usize,
    m: usize,
    bits: u32,
    /// `m × 2^bits × dsub`, sub-quantizer major.
    codewords: Vec<f32>,
}

impl PqCodebook {
    pub fn new(dim: usize, m: usize, bits: u32, codewords: Vec<f32>) -> Result<Self> {
        check_shape(dim, m, bits)?;
        let expected = m * (1usize << bits) * (dim / m);
        if codewords.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} codeword floats, got {}",
                codewords.len()
            )));
        }
        if codewords.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("codewords must be finite"));
        }
        Ok(Self {
            dim,
            m,
            bits,
            codewords,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dsub(&self) -> usize {
        self.dim / self.m
    }

    pub fn ksub(&self) -> usize {
        1 << self.bits
    }

    pub fn codewords(&self) -> &[f32] {
        &self.codewords
    }

    /// Bytes per encoded vector.
    pub fn code_size(&self) -> usize {
        (self.m * self.bits as usize).div_ceil(8)
    }

    #[inline]
    pub fn codeword(&self, sub: usize, c: usize) -> &[f32] {
        let dsub = self.dsub();
        let start = (sub * self.ksub() + c) * dsub;
        &self.codewords[start..start + dsub]
    }

    #[inline]
    fn sub_code(&self, code: &[u8], sub: usize) -> usize {
        if self.bits == 8 {
            code[sub] as usize
        } else {
            let b = code[sub / 2];
            if sub % 2 == 0 {
                (b & 0x0f) as usize
            } else {
                (b >> 4) as usize
            }
        }
    }

    pub fn encode_into(&self, x: &[f32], out: &mut [u8]) {
        debug_assert_eq!(x.len(), self.dim);
        out.fill(0);
        let dsub = self.dsub();
        for sub in 0..self.m {
            let xs = &x[sub * dsub..(sub + 1) * dsub];
            let mut best = (0usize, f64::INFINITY);
            for c in 0..self.ksub() {
                let d = l2sq(xs, self.codeword(sub, c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            if self.bits == 8 {
                out[sub] = best.0 as u8;
            } else if sub % 2 == 0 {
                out[sub / 2] |= best.0 as u8;
            } else {
                out[sub / 2] |= (best.0 as u8) << 4;
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

    pub fn decode_into(&self, code: &[u8], out: &mut [f32]) {
        let dsub = self.dsub();
        for sub in 0..self.m {
            let c = self.sub_code(code, sub);
            out[sub * dsub..(sub + 1) * dsub].copy_from_slice(self.codeword(sub, c));
        }
    }

    pub fn decode(&self, code: &[u8]) -> Result<Vec<f32>> {
        if code.len() != self.code_size() {
            return Err(Error::invalid(format!(
                "code has {} bytes, expected {}",
                code.len(),
                self.code_size()
            )));
        }
        let mut out = vec![0f32; self.dim];
        self.decode_into(code, &mut out);
        Ok(out)
    }

    /// `table[sub * ksub + c] = ‖q_sub - codeword(sub, c)‖²`.
    pub fn adc_tables(&self, q: &[f32]) -> Result<AdcTable> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: q.len(),
            });
        }
        Ok(self.adc_tables_unchecked(q))
    }

    pub(crate) fn adc_tables_unchecked(&self, q: &[f32]) -> AdcTable {
        let dsub = self.dsub();
        let ksub = self.ksub();
        let mut table = Vec::with_capacity(self.m * ksub);
        for sub in 0..self.m {
            let qs = &q[sub * dsub..(sub + 1) * dsub];
            for c in 0..ksub {
                table.push(l2sq(qs, self.codeword(sub, c)));
            }
        }
        AdcTable {
            m: self.m,
            bits: self.bits,
            table,
        }
    }
}

/// Per-query lookup table for asymmetric distances.
#[derive(Clone, Debug)]
pub struct AdcTable {
    m: usize,
    bits: u32,
    table: Vec<f64>,
}

impl AdcTable {
    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }

    /// `Σ_sub table[sub][code[sub]]`, summed in sub-quantizer order.
    #[inline]
    pub fn distance(&self, code: &[u8]) -> f64 {
        let mut acc = 0f64;
        if self.bits == 8 {
            for (sub, &c) in code.iter().enumerate().take(self.m) {
                acc += self.table[sub * 256 + c as usize];
            }
        } else {
            for sub in 0..self.m {
                let b = code[sub / 2];
                let c = if sub % 2 == 0 { b & 0x0f } else { b >> 4 };
                acc += self.table[sub * 16 + c as usize];
            }
        }
        acc
    }
}

fn check_shape(dim: usize, m: usize, bits: u32) -> Result<()> {
    if m == 0 || dim % m != 0 {
        return Err(Error::invalid(format!(
            "dimension {dim} is not divisible by {m} sub-quantizers"
        )));
    }
    if bits != 4 && bits != 8 {
        return Err(Error::invalid(format!("bits must be 4 or 8, got {bits}")));
    }
    Ok(())
}

/// One k-means per subspace, `2^bits` centroids each.
pub fn train_pq(data: &VectorDataset, m: usize, bits: u32, seed_root: u64) -> Result<PqCodebook> {
    let dim = data.dim();
    check_shape(dim, m, bits)?;
    let ksub = 1usize << bits;
    if data.len() < ksub {
        return Err(Error::invalid(format!(
            "need at least {ksub} training vectors, got {}",
            data.len()
        )));
    }
    let dsub = dim / m;
    let mut codewords = Vec::with_capacity(m * ksub * dsub);
    for sub in 0..m {
        let part = data.columns(sub * dsub, dsub)?;
        let km = train_kmeans(
            &part,
            ksub,
            PQ_TRAIN_ITERS,
            seed::derive(seed_root, seed::stage::PQ, sub as u64),
        )?;
        codewords.extend_from_slice(km.centroids.vectors().as_slice());
    }
    PqCodebook::new(dim, m, bits, codewords)
}

/// Mean squared reconstruction error over `data`.
pub fn reconstruction_mse(cb: &PqCodebook, data: &VectorDataset) -> f64 {
    let mut code = vec![0u8; cb.code_size()];
    let mut rec = vec![0f32; cb.dim()];
    let mut total = 0.0;
    for x in data.rows() {
        cb.encode_into(x, &mut code);
        cb.decode_into(&code, &mut rec);
        total += l2sq(x, &rec);
    }
    total / data.len().max(1) as f64
}
