//! Approximate search: k-means partitions, PQ and ITQ codecs, IVF search.

pub mod itq;
pub mod ivf;
pub mod kmeans;
pub mod persist;
pub mod pq;

pub use itq::{hamming, train_itq, ItqModel, ItqTraining, ITQ_DEFAULT_ITERS};
pub use ivf::{
    build_ivf, coarse_assign, train_pq_assigner, Assigner, Codec, InvertedList, IvfIndex, IvfProbe,
    DEFAULT_RERANK_FACTOR,
};
pub use kmeans::{train_kmeans, Centroids, KMeans};
pub use persist::{load_ivf, read_meta, save_ivf, IvfMeta, IVF_MAGIC};
pub use pq::{reconstruction_mse, train_pq, AdcTable, PqCodebook};
