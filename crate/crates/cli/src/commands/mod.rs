//! One module per subcommand, plus the loaders and index training they
//! share.

pub mod build;
pub mod codec_table;
pub mod density;
pub mod fit;
pub mod gen;
pub mod sweep;

use std::fs;
use std::path::Path;

use rsbench::index::ivf::{build_ivf, train_pq_assigner, Assigner, Codec, IvfIndex};
use rsbench::index::{load_ivf, train_itq, train_kmeans, train_pq, Centroids, ITQ_DEFAULT_ITERS};
use rsbench::{brute_force_knn, PairList, PositiveModel, SynthDataset, VectorDataset};
use serde::Serialize;
use serde_json::Value;

use crate::config::{AssignerSpec, CoarseSpec, CodecSpec};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::CommonArgs;

/// Seed precedence: `--seed`, then the configuration.
pub fn resolve_seed(args: &CommonArgs, configured: u64) -> u64 {
    args.seed.unwrap_or(configured)
}

/// Creates the output directory and a recorder holding the resolved config.
pub fn start<T: Serialize>(command: &str, args: &CommonArgs, seed: u64, config: &T) -> CliResult<Recorder> {
    fs::create_dir_all(&args.out).map_err(|e| CliError::data(e.to_string()).at(&args.out))?;
    let value = serde_json::to_value(config).unwrap_or(Value::Null);
    let mut rec = Recorder::new(command, seed, value);
    rec.input(&args.config);
    Ok(rec)
}

pub fn load_dataset(path: &Path, rec: &mut Recorder) -> CliResult<SynthDataset> {
    rec.input(path);
    SynthDataset::load(path).map_err(|e| {
        let mut err = CliError::from(e).at(path);
        err.code = crate::error::exit::DATA;
        err
    })
}

pub fn load_model(path: &Path, rec: &mut Recorder) -> CliResult<PositiveModel> {
    rec.input(path);
    PositiveModel::read_csv(path).map_err(|e| CliError::data(e.to_string()).at(path))
}

/// Loads an index and checks it was built over `db`.
pub fn load_index(path: &Path, db: &VectorDataset, rec: &mut Recorder) -> CliResult<IvfIndex> {
    rec.input(path);
    let index = load_ivf(path).map_err(|e| CliError::data(e.to_string()).at(path))?;
    let db_len: usize = index.lists().iter().map(|l| l.ids.len()).sum();
    if index.centroids().dim() != db.dim() || db_len != db.len() {
        return Err(CliError::data(format!(
            "index covers {db_len} vectors of dimension {}, dataset has {} of dimension {}",
            index.centroids().dim(),
            db.len(),
            db.dim()
        ))
        .at(path));
    }
    Ok(index)
}

/// Exact nearest neighbor of every query.
pub fn exact_nearest(queries: &VectorDataset, db: &VectorDataset) -> CliResult<Vec<u32>> {
    Ok(first_per_query(&brute_force_knn(queries, db, 1)?, queries.len()))
}

/// Top result of each query in a canonically sorted list; `u32::MAX` when a
/// query has none.
pub fn first_per_query(list: &PairList, n_queries: usize) -> Vec<u32> {
    let mut out = vec![u32::MAX; n_queries];
    let mut last = u32::MAX;
    for p in list.iter() {
        if p.query != last {
            out[p.query as usize] = p.db;
            last = p.query;
        }
    }
    out
}

/// Fraction of queries whose top result is their exact nearest neighbor.
pub fn recall_at_1(found: &[u32], truth: &[u32]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = found.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Partitions and assigner trained on a subsample of the train split.
pub struct Coarse {
    pub centroids: Centroids,
    pub assigner: Assigner,
    pub sample: VectorDataset,
}

pub fn train_coarse(ds: &SynthDataset, spec: &CoarseSpec, seed: u64) -> CliResult<Coarse> {
    if spec.train_size == 0 {
        return Err(CliError::config("ivf.train_size must be positive"));
    }
    let sample = ds.train.subsample(spec.train_size, seed)?;
    let km = train_kmeans(&sample, spec.k, spec.kmeans_iters, seed)?;
    let assigner = match spec.assigner {
        AssignerSpec::Exact => Assigner::Exact,
        AssignerSpec::PqApprox { m, bits, rerank_factor } => {
            train_pq_assigner(&km.centroids, m, bits, rerank_factor, seed)?
        }
    };
    Ok(Coarse {
        centroids: km.centroids,
        assigner,
        sample,
    })
}

pub fn train_codec(coarse: &Coarse, spec: CodecSpec, residual: bool, seed: u64) -> CliResult<Codec> {
    if residual && !matches!(spec, CodecSpec::Pq { .. }) {
        return Err(CliError::config(format!("residual encoding requires a PQ codec, got {spec}")));
    }
    Ok(match spec {
        CodecSpec::Flat => Codec::Flat,
        CodecSpec::Pq { m, bits } => {
            let data = if residual {
                coarse.centroids.residuals(&coarse.sample)?
            } else {
                coarse.sample.clone()
            };
            Codec::Pq(train_pq(&data, m, bits, seed)?)
        }
        CodecSpec::Itq { n_bits } => Codec::Itq(train_itq(&coarse.sample, n_bits, ITQ_DEFAULT_ITERS, seed)?.model),
    })
}

pub fn build_index(db: &VectorDataset, coarse: &Coarse, codec: Codec, residual: bool) -> CliResult<IvfIndex> {
    Ok(build_ivf(db, coarse.centroids.clone(), codec, residual)?.with_assigner(coarse.assigner.clone())?)
}

/// Sorted, deduplicated copy.
pub fn ascending(values: &[usize]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}
