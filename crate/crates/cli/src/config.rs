//! Command configurations. Every struct rejects unknown keys; serde's
//! messages name the offending or missing key.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rsbench::rsm::BudgetMode;
use rsbench::{OracleSetting, SynthConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(e.to_string()).at(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()).at(path))
}

pub type GenConfig = SynthConfig;

fn default_train_queries() -> usize {
    10_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub dataset: PathBuf,
    pub setting: OracleSetting,
    /// Every training pair closer than this is labeled.
    pub r2_max: f64,
    /// Uniformly drawn pairs beyond `r2_max`.
    pub n_far: usize,
    /// Leading train rows used as queries against the rest of the split.
    #[serde(default = "default_train_queries")]
    pub train_queries: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Codec name: `flat`, `PQ<m>x<bits>` or `ITQ<bits>` (case-insensitive).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodecSpec {
    Flat,
    Pq { m: usize, bits: u32 },
    Itq { n_bits: usize },
}

impl FromStr for CodecSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        let bad = || format!("unknown codec {s:?}, expected flat, PQ<m>x<bits> or ITQ<bits>");
        if lower == "flat" {
            return Ok(CodecSpec::Flat);
        }
        if let Some(rest) = lower.strip_prefix("pq") {
            let (m, bits) = rest.split_once('x').ok_or_else(bad)?;
            return Ok(CodecSpec::Pq {
                m: m.parse().map_err(|_| bad())?,
                bits: bits.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = lower.strip_prefix("itq") {
            return Ok(CodecSpec::Itq {
                n_bits: rest.parse().map_err(|_| bad())?,
            });
        }
        Err(bad())
    }
}

impl fmt::Display for CodecSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecSpec::Flat => write!(f, "Flat"),
            CodecSpec::Pq { m, bits } => write!(f, "PQ{m}x{bits}"),
            CodecSpec::Itq { n_bits } => write!(f, "ITQ{n_bits}"),
        }
    }
}

impl Serialize for CodecSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CodecSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssignerSpec {
    Exact,
    PqApprox {
        m: usize,
        bits: u32,
        #[serde(default = "default_rerank")]
        rerank_factor: usize,
    },
}

fn default_rerank() -> usize {
    rsbench::index::ivf::DEFAULT_RERANK_FACTOR
}

fn default_assigner() -> AssignerSpec {
    AssignerSpec::Exact
}

fn default_kmeans_iters() -> usize {
    10
}

fn default_train_size() -> usize {
    50_000
}

/// Coarse quantizer settings shared by `build` and `codec-table`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseSpec {
    /// Number of partitions.
    pub k: usize,
    #[serde(default = "default_kmeans_iters")]
    pub kmeans_iters: usize,
    /// Train rows sampled for k-means and codec training.
    #[serde(default = "default_train_size")]
    pub train_size: usize,
    #[serde(default = "default_assigner")]
    pub assigner: AssignerSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub dataset: PathBuf,
    pub ivf: CoarseSpec,
    pub codec: CodecSpec,
    #[serde(default)]
    pub residual: bool,
    #[serde(default)]
    pub seed: u64,
}

/// A saved IVF index probed at a fixed depth.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexRef {
    pub path: PathBuf,
    pub nprobe: usize,
}

fn default_modes() -> Vec<BudgetMode> {
    vec![BudgetMode::Range, BudgetMode::Knn]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBudgetConfig {
    pub dataset: PathBuf,
    pub model: PathBuf,
    /// Labels the realized shortlists.
    pub setting: OracleSetting,
    /// Exact search when absent.
    #[serde(default)]
    pub index: Option<IndexRef>,
    pub budgets: Vec<usize>,
    #[serde(default = "default_modes")]
    pub modes: Vec<BudgetMode>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepNprobeConfig {
    pub dataset: PathBuf,
    pub model: PathBuf,
    /// Directory written by `build`.
    pub index: PathBuf,
    pub nprobes: Vec<usize>,
    /// Range-mode verification budget.
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerSetting<T> {
    pub strict: T,
    pub relaxed: T,
}

impl<T> PerSetting<T> {
    pub fn get(&self, s: OracleSetting) -> &T {
        match s {
            OracleSetting::Strict => &self.strict,
            OracleSetting::Relaxed => &self.relaxed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecRow {
    pub codec: CodecSpec,
    #[serde(default)]
    pub residual: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecTableConfig {
    pub dataset: PathBuf,
    pub models: PerSetting<PathBuf>,
    /// Range-mode budgets.
    pub budgets: PerSetting<usize>,
    pub ivf: CoarseSpec,
    pub nprobe: usize,
    pub codecs: Vec<CodecRow>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Gaussian,
    Sphere,
}

impl DensityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityKind::Gaussian => "gaussian",
            DensityKind::Sphere => "sphere",
        }
    }
}

fn default_grid_points() -> usize {
    2001
}

fn default_kinds() -> Vec<DensityKind> {
    vec![DensityKind::Gaussian, DensityKind::Sphere]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub dims: Vec<usize>,
    #[serde(default = "default_kinds")]
    pub distributions: Vec<DensityKind>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_names_roundtrip() {
        for s in ["Flat", "PQ8x8", "PQ16x4", "ITQ64"] {
            let c: CodecSpec = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!("pq8x4".parse::<CodecSpec>().unwrap(), CodecSpec::Pq { m: 8, bits: 4 });
        assert!("PQ8".parse::<CodecSpec>().is_err());
        assert!("LSH".parse::<CodecSpec>().is_err());
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let e = serde_json::from_str::<FitConfig>(
            r#"{"dataset":"d","setting":"strict","r2_max":1,"n_far":0,"bogus":1}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = serde_json::from_str::<FitConfig>(r#"{"dataset":"d","setting":"strict","n_far":0}"#).unwrap_err();
        assert!(e.to_string().contains("r2_max"), "{e}");
    }

    #[test]
    fn nested_ivf_spec_and_defaults() {
        let c: BuildConfig = serde_json::from_str(r#"{"dataset":"d","ivf":{"k":4},"codec":"PQ2x4"}"#).unwrap();
        assert_eq!(c.ivf.k, 4);
        assert_eq!(c.ivf.kmeans_iters, 10);
        assert_eq!(c.ivf.assigner, AssignerSpec::Exact);
        assert!(!c.residual);
        let c: BuildConfig = serde_json::from_str(
            r#"{"dataset":"d","ivf":{"k":4,"assigner":{"kind":"pq_approx","m":2,"bits":4}},"codec":"flat"}"#,
        )
        .unwrap();
        assert_eq!(
            c.ivf.assigner,
            AssignerSpec::PqApprox {
                m: 2,
                bits: 4,
                rerank_factor: 8
            }
        );
        let e = serde_json::from_str::<BuildConfig>(r#"{"dataset":"d","ivf":{"k":4,"kk":1},"codec":"flat"}"#)
            .unwrap_err();
        assert!(e.to_string().contains("kk"), "{e}");
    }
}
