//! On-disk IVF index directory.
//!
//! ```text
//! meta.json                  layout, codec and assigner description
//! centroids.fvecs            coarse centroids
//! lists.bin                  magic, then per list: i32 length, i32 ids, codes
//! pq_codewords.fvecs         PQ codec only, one codeword per record
//! itq.json                   ITQ codec only
//! assigner_codewords.fvecs   PQ assigner only
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atomic::write_atomic;
use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::fvecs::{read_fvecs, write_fvecs};
use crate::index::itq::ItqModel;
use crate::index::ivf::{Assigner, Codec, InvertedList, IvfIndex};
use crate::index::kmeans::Centroids;
use crate::index::pq::PqCodebook;

pub const IVF_MAGIC: &str = "RSBENCH-IVF-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodecMeta {
    Flat,
    Pq { m: usize, bits: u32 },
    Itq { n_bits: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssignerMeta {
    Exact,
    PqApprox { m: usize, bits: u32, rerank_factor: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IvfMeta {
    pub magic: String,
    pub dim: usize,
    pub k: usize,
    pub db_len: usize,
    pub code_size: usize,
    pub codec: CodecMeta,
    pub residual: bool,
    pub assigner: AssignerMeta,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItqFile {
    n_bits: usize,
    mean: Vec<f64>,
    projection: Vec<f64>,
    rotation: Vec<f64>,
}

fn codewords_dataset(cb: &PqCodebook) -> Result<VectorDataset> {
    VectorDataset::new(cb.dsub(), cb.codewords().to_vec())
}

fn read_codebook(path: &Path, dim: usize, m: usize, bits: u32) -> Result<PqCodebook> {
    let ds = read_fvecs(path)?;
    PqCodebook::new(dim, m, bits, ds.into_vec())
}

pub fn save_ivf(index: &IvfIndex, dir: impl AsRef<Path>, seed: u64) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let codec = match index.codec() {
        Codec::Flat => CodecMeta::Flat,
        Codec::Pq(cb) => {
            write_fvecs(dir.join("pq_codewords.fvecs"), &codewords_dataset(cb)?)?;
            CodecMeta::Pq {
                m: cb.m(),
                bits: cb.bits(),
            }
        }
        Codec::Itq(model) => {
            let file = ItqFile {
                n_bits: model.n_bits(),
                mean: model.mean().to_vec(),
                projection: model.projection().to_vec(),
                rotation: model.rotation().to_vec(),
            };
            write_atomic(dir.join("itq.json"), &serde_json::to_vec(&file)?)?;
            CodecMeta::Itq {
                n_bits: model.n_bits(),
            }
        }
    };
    let assigner = match index.assigner() {
        Assigner::Exact => AssignerMeta::Exact,
        Assigner::PqApprox {
            codebook,
            rerank_factor,
        } => {
            write_fvecs(dir.join("assigner_codewords.fvecs"), &codewords_dataset(codebook)?)?;
            AssignerMeta::PqApprox {
                m: codebook.m(),
                bits: codebook.bits(),
                rerank_factor: *rerank_factor,
            }
        }
    };
    let dim = index.centroids().dim();
    let meta = IvfMeta {
        magic: IVF_MAGIC.to_string(),
        dim,
        k: index.k(),
        db_len: index.lists().iter().map(|l| l.ids.len()).sum(),
        code_size: index.code_size(),
        codec,
        residual: index.residual(),
        assigner,
        seed,
    };
    write_fvecs(dir.join("centroids.fvecs"), index.centroids().vectors())?;
    write_atomic(dir.join("lists.bin"), &encode_lists(index.lists()))?;
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    write_atomic(dir.join("meta.json"), json.as_bytes())
}

fn encode_lists(lists: &[InvertedList]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(IVF_MAGIC.as_bytes());
    for list in lists {
        out.extend_from_slice(&(list.ids.len() as i32).to_le_bytes());
        for &id in &list.ids {
            out.extend_from_slice(&(id as i32).to_le_bytes());
        }
        out.extend_from_slice(&list.codes);
    }
    out
}

fn decode_lists(bytes: &[u8], k: usize, code_size: usize) -> Result<Vec<InvertedList>> {
    let bad = |msg: String| Error::format("lists.bin", msg);
    let rest = bytes
        .strip_prefix(IVF_MAGIC.as_bytes())
        .ok_or_else(|| bad("missing magic".into()))?;
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let end = pos.checked_add(n).filter(|&e| e <= rest.len());
        let end = end.ok_or_else(|| bad("truncated".into()))?;
        let s = &rest[pos..end];
        pos = end;
        Ok(s)
    };
    let mut lists = Vec::with_capacity(k);
    for l in 0..k {
        let len = i32::from_le_bytes(take(4)?.try_into().unwrap());
        if len < 0 {
            return Err(bad(format!("list {l} has negative length")));
        }
        let len = len as usize;
        let ids = take(len.checked_mul(4).ok_or_else(|| bad("length overflow".into()))?)?
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()))
            .map(|id| u32::try_from(id).map_err(|_| bad(format!("negative id in list {l}"))))
            .collect::<Result<Vec<u32>>>()?;
        let codes = take(len.checked_mul(code_size).ok_or_else(|| bad("length overflow".into()))?)?.to_vec();
        lists.push(InvertedList { ids, codes });
    }
    if pos != rest.len() {
        return Err(bad(format!("{} trailing bytes", rest.len() - pos)));
    }
    Ok(lists)
}

pub fn read_meta(dir: impl AsRef<Path>) -> Result<IvfMeta> {
    let meta: IvfMeta = serde_json::from_slice(&fs::read(dir.as_ref().join("meta.json"))?)?;
    if meta.magic != IVF_MAGIC {
        return Err(Error::format(
            "meta.json",
            format!("unsupported magic {:?}, expected {IVF_MAGIC:?}", meta.magic),
        ));
    }
    Ok(meta)
}

pub fn load_ivf(dir: impl AsRef<Path>) -> Result<IvfIndex> {
    let dir = dir.as_ref();
    let meta = read_meta(dir)?;
    let centroids = Centroids::new(read_fvecs(dir.join("centroids.fvecs"))?)?;
    if centroids.k() != meta.k || centroids.dim() != meta.dim {
        return Err(Error::format("centroids.fvecs", "shape disagrees with meta.json"));
    }
    let codec = match meta.codec {
        CodecMeta::Flat => Codec::Flat,
        CodecMeta::Pq { m, bits } => Codec::Pq(read_codebook(&dir.join("pq_codewords.fvecs"), meta.dim, m, bits)?),
        CodecMeta::Itq { n_bits } => {
            let f: ItqFile = serde_json::from_slice(&fs::read(dir.join("itq.json"))?)?;
            if f.n_bits != n_bits {
                return Err(Error::format("itq.json", "n_bits disagrees with meta.json"));
            }
            Codec::Itq(ItqModel::new(f.mean, f.n_bits, f.projection, f.rotation)?)
        }
    };
    if codec.code_size(meta.dim) != meta.code_size {
        return Err(Error::format("meta.json", "code_size disagrees with codec"));
    }
    let assigner = match meta.assigner {
        AssignerMeta::Exact => Assigner::Exact,
        AssignerMeta::PqApprox { m, bits, rerank_factor } => Assigner::PqApprox {
            codebook: read_codebook(&dir.join("assigner_codewords.fvecs"), meta.dim, m, bits)?,
            rerank_factor,
        },
    };
    let lists = decode_lists(&fs::read(dir.join("lists.bin"))?, meta.k, meta.code_size)?;
    IvfIndex::from_parts(centroids, codec, meta.residual, assigner, lists, meta.db_len)
}
