//! Synthetic datasets with planted match groups and a pair oracle.
//!
//! Every item belongs to a latent group: a power-law sized group or a
//! singleton. An item's latent content is its group center plus spread
//! `α·u`; its embedding is `normalize(content + σ·η)`. A pair is positive
//! when both items share a group and their contents lie within `τ`.
//!
//! Item ids run over the splits in order: queries, then database, then
//! train. Which items are grouped is random, so the three splits are
//! disjoint random subsets of one population.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::atomic::write_atomic;
use crate::dataset::{l2_norm, l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::fvecs::{read_fvecs, write_fvecs};
use crate::pairs::{Pair, PairList};
use crate::seed;

/// Smallest size of a planted group.
pub const MIN_GROUP_SIZE: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub dim: usize,
    /// Database items.
    pub n_items: usize,
    pub n_queries: usize,
    pub n_train: usize,
    pub n_groups: usize,
    /// Group size ∝ rank^(−power_exponent).
    pub power_exponent: f64,
    /// Fraction of all items that belong to no group.
    pub singleton_fraction: f64,
    /// α: spread of content around its group center.
    pub content_spread: f64,
    /// σ: noise added to content before normalization.
    pub embedding_noise: f64,
    /// Content-distance thresholds for the two oracle settings.
    pub tau_strict: f64,
    pub tau_relaxed: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SynthConfig {
    /// 64-d, 10⁵ database items, 10⁴ queries, 2·10⁵ training items.
    pub fn desk_default() -> Self {
        Self {
            dim: 64,
            n_items: 100_000,
            n_queries: 10_000,
            n_train: 200_000,
            n_groups: 2000,
            power_exponent: 1.5,
            singleton_fraction: 0.97,
            content_spread: 0.35,
            embedding_noise: 0.2,
            tau_strict: 3.94,
            tau_relaxed: 4.31,
            seed: 1,
        }
    }

    pub fn total_items(&self) -> usize {
        self.n_queries + self.n_items + self.n_train
    }

    /// Items that belong to planted groups.
    pub fn n_grouped(&self) -> usize {
        ((1.0 - self.singleton_fraction) * self.total_items() as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if self.dim == 0 {
            return bad("dim must be positive".into());
        }
        for (name, v) in [
            ("n_items", self.n_items),
            ("n_queries", self.n_queries),
            ("n_train", self.n_train),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.total_items() > u32::MAX as usize {
            return bad("too many items for 32-bit ids".into());
        }
        if !(self.power_exponent > 0.0) {
            return bad(format!("power_exponent must be > 0, got {}", self.power_exponent));
        }
        if !(0.0..=1.0).contains(&self.singleton_fraction) {
            return bad(format!("singleton_fraction must be in [0, 1], got {}", self.singleton_fraction));
        }
        if !(self.content_spread > 0.0 && self.content_spread.is_finite()) {
            return bad(format!("content_spread must be > 0, got {}", self.content_spread));
        }
        if !(self.embedding_noise > 0.0 && self.embedding_noise.is_finite()) {
            return bad(format!("embedding_noise must be > 0, got {}", self.embedding_noise));
        }
        if !(self.tau_strict >= 0.0 && self.tau_strict < self.tau_relaxed && self.tau_relaxed.is_finite()) {
            return bad(format!(
                "need 0 ≤ tau_strict < tau_relaxed, got {} and {}",
                self.tau_strict, self.tau_relaxed
            ));
        }
        if self.n_grouped() > 0 && self.n_groups == 0 {
            return bad("singleton_fraction < 1 needs n_groups > 0".into());
        }
        if self.n_groups * MIN_GROUP_SIZE > self.n_grouped() {
            return bad(format!(
                "{} groups of at least {MIN_GROUP_SIZE} items cannot fit in {} grouped items",
                self.n_groups,
                self.n_grouped()
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSetting {
    Strict,
    Relaxed,
}

impl OracleSetting {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleSetting::Strict => "strict",
            OracleSetting::Relaxed => "relaxed",
        }
    }
}

impl fmt::Display for OracleSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(OracleSetting::Strict),
            "relaxed" => Ok(OracleSetting::Relaxed),
            _ => Err(Error::invalid(format!("unknown oracle setting {s:?}"))),
        }
    }
}

/// Sizes `max(2, c·r^(−γ))` for ranks `r = 1..=n_groups`, with `c` chosen so
/// the sizes sum to `n_grouped`. Rounding remainders go to the largest
/// fractional parts.
pub fn group_sizes(n_groups: usize, n_grouped: usize, gamma: f64) -> Result<Vec<usize>> {
    if n_groups == 0 {
        return if n_grouped == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::invalid("grouped items but no groups"))
        };
    }
    if n_groups * MIN_GROUP_SIZE > n_grouped {
        return Err(Error::invalid(format!(
            "{n_groups} groups cannot cover {n_grouped} items with minimum size {MIN_GROUP_SIZE}"
        )));
    }
    let weights: Vec<f64> = (1..=n_groups).map(|r| (r as f64).powf(-gamma)).collect();
    let min = MIN_GROUP_SIZE as f64;
    let total = |c: f64| weights.iter().map(|w| (c * w).max(min)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, n_grouped as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < n_grouped as f64 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let real: Vec<f64> = weights.iter().map(|w| (hi * w).max(min)).collect();
    let mut sizes: Vec<usize> = real.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut remainder = n_grouped.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..n_groups).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (real[a] - real[a].floor(), real[b] - real[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut i = 0;
    while remainder > 0 {
        sizes[order[i % n_groups]] += 1;
        remainder -= 1;
        i += 1;
    }
    // bisection overshoot can only leave the sum at or below the target
    debug_assert_eq!(sizes.iter().sum::<usize>(), n_grouped);
    Ok(sizes)
}

/// Latent state behind every item; never derived from embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOracle {
    dim: usize,
    groups: Vec<u32>,
    content: Vec<f32>,
    tau_strict: f64,
    tau_relaxed: f64,
    n_queries: usize,
    n_items: usize,
}

impl SynthOracle {
    /// `groups[i]` and `content[i·dim..]` describe item `i`; the first
    /// `n_queries` items are queries and the next `n_items` database items.
    pub fn from_parts(
        dim: usize,
        groups: Vec<u32>,
        content: Vec<f32>,
        tau_strict: f64,
        tau_relaxed: f64,
        n_queries: usize,
        n_items: usize,
    ) -> Result<Self> {
        if content.len() != groups.len() * dim {
            return Err(Error::invalid("content does not match group count"));
        }
        if n_queries + n_items > groups.len() {
            return Err(Error::invalid("split sizes exceed item count"));
        }
        if !(tau_strict <= tau_relaxed) {
            return Err(Error::invalid("tau_strict must not exceed tau_relaxed"));
        }
        Ok(Self {
            dim,
            groups,
            content,
            tau_strict,
            tau_relaxed,
            n_queries,
            n_items,
        })
    }

    pub fn n_total(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, item: usize) -> u32 {
        self.groups[item]
    }

    pub fn groups(&self) -> &[u32] {
        &self.groups
    }

    pub fn content(&self, item: usize) -> &[f32] {
        &self.content[item * self.dim..(item + 1) * self.dim]
    }

    pub fn tau(&self, setting: OracleSetting) -> f64 {
        match setting {
            OracleSetting::Strict => self.tau_strict,
            OracleSetting::Relaxed => self.tau_relaxed,
        }
    }

    pub fn query_item(&self, q: u32) -> usize {
        q as usize
    }

    pub fn db_item(&self, x: u32) -> usize {
        self.n_queries + x as usize
    }

    pub fn train_item(&self, t: u32) -> usize {
        self.n_queries + self.n_items + t as usize
    }

    /// Label for two items given by global id.
    pub fn label_items(&self, a: usize, b: usize, setting: OracleSetting) -> bool {
        if self.groups[a] != self.groups[b] {
            return false;
        }
        let tau = self.tau(setting);
        l2sq(self.content(a), self.content(b)) <= tau * tau
    }

    /// Label for query `q` against database item `x`.
    pub fn label(&self, q: u32, x: u32, setting: OracleSetting) -> bool {
        self.label_items(self.query_item(q), self.db_item(x), setting)
    }

    pub fn check_ids(&self, pairs: &PairList) -> Result<()> {
        pairs.validate_ids(self.n_queries, self.n_items)
    }
}

#[derive(Clone, Debug)]
pub struct SynthDataset {
    pub config: SynthConfig,
    pub queries: VectorDataset,
    pub db: VectorDataset,
    pub train: VectorDataset,
    pub oracle: SynthOracle,
}

struct Latent {
    groups: Vec<u32>,
    content: Vec<f32>,
    embeddings: Vec<f32>,
}

fn generate_latent(config: &SynthConfig) -> Result<Latent> {
    config.validate()?;
    let d = config.dim;
    let total = config.total_items();
    let sizes = group_sizes(config.n_groups, config.n_grouped(), config.power_exponent)?;
    let mut rng = seed::rng(config.seed, seed::stage::SYNTH, 0);

    let mut groups: Vec<u32> = Vec::with_capacity(total);
    for (g, &s) in sizes.iter().enumerate() {
        groups.extend(std::iter::repeat_n(g as u32, s));
    }
    let n_singletons = total - groups.len();
    let first_singleton = config.n_groups as u32;
    groups.extend((0..n_singletons as u32).map(|i| first_singleton + i));
    groups.shuffle(&mut rng);

    let mut centers = vec![0f32; config.n_groups * d];
    for c in &mut centers {
        *c = rng.sample(StandardNormal);
    }
    let alpha = config.content_spread as f32;
    let sigma = config.embedding_noise as f32;
    let mut content = vec![0f32; total * d];
    let mut embeddings = vec![0f32; total * d];
    let mut own_center = vec![0f32; d];
    for (i, &g) in groups.iter().enumerate() {
        let center: &[f32] = if (g as usize) < config.n_groups {
            &centers[g as usize * d..(g as usize + 1) * d]
        } else {
            for c in &mut own_center {
                *c = rng.sample(StandardNormal);
            }
            &own_center
        };
        let v = &mut content[i * d..(i + 1) * d];
        for (vj, &cj) in v.iter_mut().zip(center) {
            *vj = cj + alpha * rng.sample::<f32, _>(StandardNormal);
        }
        let x = &mut embeddings[i * d..(i + 1) * d];
        for (xj, &vj) in x.iter_mut().zip(v.iter()) {
            *xj = vj + sigma * rng.sample::<f32, _>(StandardNormal);
        }
        let norm = l2_norm(x);
        if norm > 0.0 {
            for xj in x.iter_mut() {
                *xj = (*xj as f64 / norm) as f32;
            }
        }
    }
    Ok(Latent {
        groups,
        content,
        embeddings,
    })
}

/// Deterministic in `config` (including its seed).
pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    let Latent {
        groups,
        content,
        embeddings,
    } = generate_latent(config)?;
    let d = config.dim;
    let (nq, nx) = (config.n_queries, config.n_items);
    let queries = VectorDataset::new(d, embeddings[..nq * d].to_vec())?;
    let db = VectorDataset::new(d, embeddings[nq * d..(nq + nx) * d].to_vec())?;
    let train = VectorDataset::new(d, embeddings[(nq + nx) * d..].to_vec())?;
    let oracle = SynthOracle::from_parts(d, groups, content, config.tau_strict, config.tau_relaxed, nq, nx)?;
    Ok(SynthDataset {
        config: config.clone(),
        queries,
        db,
        train,
        oracle,
    })
}

impl SynthDataset {
    /// Every positive (query, database) pair with its embedding distance,
    /// sorted canonically.
    pub fn positive_pairs(&self, setting: OracleSetting) -> PairList {
        let o = &self.oracle;
        let n_groups = self.config.n_groups;
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); n_groups];
        for x in 0..self.db.len() as u32 {
            let g = o.group(o.db_item(x)) as usize;
            if g < n_groups {
                members[g].push(x);
            }
        }
        let mut out = Vec::new();
        for q in 0..self.queries.len() as u32 {
            let g = o.group(o.query_item(q)) as usize;
            if g >= n_groups {
                continue;
            }
            let mut hits: Vec<Pair> = members[g]
                .iter()
                .filter(|&&x| o.label(q, x, setting))
                .map(|&x| Pair::new(q, x, l2sq(self.queries.row(q as usize), self.db.row(x as usize))))
                .collect();
            hits.sort_by(Pair::cmp_canonical);
            out.extend(hits);
        }
        PairList::new(out).expect("positive pairs are distinct with finite distances")
    }

    /// Writes `queries.fvecs`, `db.fvecs`, `train.fvecs`, `labels.csv`
    /// (`item_id,group_id`) and `config.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_fvecs(dir.join("queries.fvecs"), &self.queries)?;
        write_fvecs(dir.join("db.fvecs"), &self.db)?;
        write_fvecs(dir.join("train.fvecs"), &self.train)?;
        let mut labels = String::with_capacity(self.oracle.n_total() * 12);
        labels.push_str("item_id,group_id\n");
        for (i, g) in self.oracle.groups().iter().enumerate() {
            labels.push_str(&format!("{i},{g}\n"));
        }
        write_atomic(dir.join("labels.csv"), labels.as_bytes())?;
        let mut json = serde_json::to_string_pretty(&self.config)?;
        json.push('\n');
        write_atomic(dir.join("config.json"), json.as_bytes())
    }

    /// Reads the vectors and labels written by [`save`](Self::save). The
    /// latent content is regenerated from `config.json` and checked against
    /// the stored group labels.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let config: SynthConfig = serde_json::from_slice(&fs::read(dir.join("config.json"))?)?;
        let queries = read_fvecs(dir.join("queries.fvecs"))?;
        let db = read_fvecs(dir.join("db.fvecs"))?;
        let train = read_fvecs(dir.join("train.fvecs"))?;
        for (name, ds, n) in [
            ("queries.fvecs", &queries, config.n_queries),
            ("db.fvecs", &db, config.n_items),
            ("train.fvecs", &train, config.n_train),
        ] {
            if ds.len() != n || ds.dim() != config.dim {
                return Err(Error::format(
                    "dataset",
                    format!("{name} holds {}×{}, config expects {n}×{}", ds.len(), ds.dim(), config.dim),
                ));
            }
        }
        let stored = read_labels(&dir.join("labels.csv"))?;
        let latent = generate_latent(&config)?;
        if stored != latent.groups {
            return Err(Error::format("labels.csv", "group labels do not match config.json"));
        }
        let oracle = SynthOracle::from_parts(
            config.dim,
            latent.groups,
            latent.content,
            config.tau_strict,
            config.tau_relaxed,
            config.n_queries,
            config.n_items,
        )?;
        Ok(Self {
            config,
            queries,
            db,
            train,
            oracle,
        })
    }
}

fn read_labels(path: &Path) -> Result<Vec<u32>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some("item_id,group_id") {
        return Err(Error::format("labels.csv", "missing header item_id,group_id"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let (id, g) = line
            .split_once(',')
            .ok_or_else(|| Error::format("labels.csv", format!("line {}: expected two fields", i + 2)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| Error::format("labels.csv", format!("line {}: {e}", i + 2)))
        };
        if parse(id)? != i as u64 {
            return Err(Error::format("labels.csv", format!("line {}: item ids must be sequential", i + 2)));
        }
        out.push(u32::try_from(parse(g)?).map_err(|_| Error::format("labels.csv", "group id overflow"))?);
    }
    Ok(out)
}

/// Per-query result counts, including zeros, sorted in decreasing order and
/// ranked from 1.
pub fn results_per_query_curve(pairs: &PairList, n_queries: usize) -> Vec<(usize, usize)> {
    let mut counts = pairs.per_query_counts(n_queries);
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.into_iter().enumerate().map(|(i, c)| (i + 1, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn small_config() -> SynthConfig {
        SynthConfig {
            dim: 16,
            n_items: 2000,
            n_queries: 200,
            n_train: 1000,
            n_groups: 40,
            power_exponent: 1.5,
            singleton_fraction: 0.8,
            content_spread: 0.35,
            embedding_noise: 0.35,
            tau_strict: 1.8,
            tau_relaxed: 2.2,
            seed: 3,
        }
    }

    #[test]
    fn group_sizes_sum_and_decrease() {
        let s = group_sizes(2000, 6200, 1.5).unwrap();
        assert_eq!(s.iter().sum::<usize>(), 6200);
        assert!(s.iter().all(|&x| x >= MIN_GROUP_SIZE));
        assert!(s[0] >= 500 && s[0] <= 2000, "largest group {}", s[0]);
        assert!(s.windows(2).all(|w| w[0] + 1 >= w[1]));
    }

    #[test]
    fn steep_power_law_leaves_minimum_groups() {
        let s = group_sizes(50, 110, 200.0).unwrap();
        assert_eq!(s.iter().sum::<usize>(), 110);
        assert!(s[1..].iter().all(|&x| x == MIN_GROUP_SIZE));
        assert_eq!(s[0], 110 - 2 * 49);
    }

    #[test]
    fn group_sizes_errors() {
        assert!(group_sizes(10, 19, 1.0).is_err());
        assert!(group_sizes(0, 5, 1.0).is_err());
        assert_eq!(group_sizes(0, 0, 1.0).unwrap(), Vec::<usize>::new());
        assert_eq!(group_sizes(3, 6, 1.0).unwrap(), vec![2, 2, 2]);
    }

    proptest! {
        #[test]
        fn group_sizes_always_cover(n in 1usize..200, extra in 0usize..2000, gamma in 0.1f64..5.0) {
            let total = 2 * n + extra;
            let s = group_sizes(n, total, gamma).unwrap();
            prop_assert_eq!(s.iter().sum::<usize>(), total);
            prop_assert!(s.iter().all(|&x| x >= MIN_GROUP_SIZE));
        }
    }

    #[test]
    fn generation_is_deterministic_and_normalized() {
        let c = small_config();
        let a = generate(&c).unwrap();
        let b = generate(&c).unwrap();
        assert_eq!(a.queries, b.queries);
        assert_eq!(a.db, b.db);
        assert_eq!(a.train, b.train);
        assert_eq!(a.oracle, b.oracle);
        for x in a.db.rows() {
            assert!((l2_norm(x) - 1.0).abs() < 1e-5);
        }
        let mut other = c.clone();
        other.seed = 4;
        assert_ne!(generate(&other).unwrap().db, a.db);
    }

    #[test]
    fn group_membership_matches_config() {
        let c = small_config();
        let ds = generate(&c).unwrap();
        let grouped = ds.oracle.groups().iter().filter(|&&g| (g as usize) < c.n_groups).count();
        assert_eq!(grouped, c.n_grouped());
        let mut seen = std::collections::HashSet::new();
        for &g in ds.oracle.groups() {
            if g as usize >= c.n_groups {
                assert!(seen.insert(g), "singleton group {g} reused");
            }
        }
    }

    #[test]
    fn all_singletons_have_no_positives() {
        let mut c = small_config();
        c.singleton_fraction = 1.0;
        c.n_groups = 0;
        let ds = generate(&c).unwrap();
        assert!(ds.positive_pairs(OracleSetting::Relaxed).is_empty());
    }

    #[test]
    fn strict_positives_are_relaxed_positives() {
        let ds = generate(&small_config()).unwrap();
        let strict = ds.positive_pairs(OracleSetting::Strict).id_pairs();
        let relaxed = ds.positive_pairs(OracleSetting::Relaxed).id_pairs();
        assert!(!strict.is_empty());
        assert!(strict.is_subset(&relaxed));
        assert!(strict.len() < relaxed.len());
    }

    #[test]
    fn oracle_rules() {
        let dim = 2;
        // items: 0 and 1 share group 0; 2 is in group 1 at the same content as 0
        let content = vec![0.0, 0.0, 3.0, 0.0, 0.0, 0.0];
        let o = SynthOracle::from_parts(dim, vec![0, 0, 1], content, 2.0, 4.0, 1, 2).unwrap();
        assert!(!o.label_items(0, 2, OracleSetting::Relaxed));
        assert!(o.label_items(0, 0, OracleSetting::Strict));
        assert!(o.label_items(0, 0, OracleSetting::Relaxed));
        assert!(!o.label_items(0, 1, OracleSetting::Strict));
        assert!(o.label_items(0, 1, OracleSetting::Relaxed));
        assert!(o.label(0, 0, OracleSetting::Relaxed));
        assert!(!o.label(0, 1, OracleSetting::Relaxed));
    }

    #[test]
    fn config_validation() {
        let good = small_config();
        assert!(good.validate().is_ok());
        let mut c = good.clone();
        c.tau_strict = c.tau_relaxed;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.n_groups = 10_000;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.embedding_noise = 0.0;
        assert!(c.validate().is_err());
        let mut c = good;
        c.power_exponent = -1.0;
        assert!(generate(&c).is_err());
        assert!(SynthConfig::desk_default().validate().is_ok());
    }

    #[test]
    fn save_load_roundtrip() {
        let ds = generate(&small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        ds.save(dir.path()).unwrap();
        let back = SynthDataset::load(dir.path()).unwrap();
        assert_eq!(back.db, ds.db);
        assert_eq!(back.oracle, ds.oracle);
        assert_eq!(back.config, ds.config);

        let labels = dir.path().join("labels.csv");
        let text = fs::read_to_string(&labels).unwrap();
        assert!(text.starts_with("item_id,group_id\n0,"));
        fs::write(&labels, text.replacen("\n0,", "\n0,9999999", 1)).unwrap();
        assert!(SynthDataset::load(dir.path()).is_err());
    }

    #[test]
    fn per_query_curve() {
        assert_eq!(results_per_query_curve(&PairList::empty(), 3), vec![(1, 0), (2, 0), (3, 0)]);
        let pairs = PairList::new((0..5).map(|x| Pair::new(1, x, 0.5)).collect()).unwrap();
        let curve = results_per_query_curve(&pairs, 3);
        assert_eq!(curve[0], (1, 5));
        assert_eq!(curve.len(), 3);
    }
}
