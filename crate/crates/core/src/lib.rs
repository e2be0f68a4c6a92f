//! Range-search benchmarking toolkit: exact and IVF search, isotonic
//! positive models, the range search metric (RSM), distance-density
//! formulas and a synthetic dataset generator with a pair oracle.

pub mod atomic;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod exact;
pub mod fvecs;
pub mod index;
pub mod isotonic;
pub mod pairs;
pub mod par;
pub mod rsm;
pub mod search;
pub mod seed;
pub mod synth;

pub use dataset::{squared_l2, VectorDataset};
pub use error::{Error, Result};
pub use exact::{brute_force_knn, brute_force_range, ExactIndex};
pub use isotonic::{fit_isotonic, LabeledPair, PositiveModel};
pub use pairs::{Pair, PairList};
pub use rsm::{bulk_shortlist, rsm_score, BudgetConfig, BudgetMode};
pub use search::SearchIndex;
pub use synth::{generate, OracleSetting, SynthConfig, SynthDataset, SynthOracle};
