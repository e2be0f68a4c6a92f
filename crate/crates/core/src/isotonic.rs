//! The positive-probability model: a non-increasing, piecewise-linear map
//! from squared distance to the probability that a pair passes verification,
//! fitted by isotonic least squares.
//!
//! Fitting first pools pairs that share a distance into their label mean,
//! then runs pool-adjacent-violators directly in the non-increasing
//! direction over the pooled groups. The fitted function keeps the first
//! and last distance of every constant block as breakpoints, which
//! reproduces linear interpolation through every fitted point.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::exact::brute_force_range;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledPair {
    pub dist2: f64,
    pub label: u8,
}

impl LabeledPair {
    pub fn new(dist2: f64, positive: bool) -> Self {
        Self {
            dist2,
            label: positive as u8,
        }
    }
}

/// Monotone non-increasing piecewise-linear probability model.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveModel {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PositiveModel {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::invalid("model needs at least one breakpoint"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid("values must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("values must be non-increasing"));
        }
        Ok(Self { breakpoints, values })
    }

    /// The model that returns `p` everywhere.
    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![p])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation between breakpoints, clamped to the first value
    /// on the left and the last value on the right.
    pub fn eval(&self, dist2: f64) -> f64 {
        let xs = &self.breakpoints;
        let ys = &self.values;
        // first index with xs[i] > dist2
        let i = xs.partition_point(|&x| x <= dist2);
        if i == 0 {
            return ys[0];
        }
        if i == xs.len() {
            return ys[xs.len() - 1];
        }
        let (x0, x1) = (xs[i - 1], xs[i]);
        let (y0, y1) = (ys[i - 1], ys[i]);
        let t = (dist2 - x0) / (x1 - x0);
        (y0 + t * (y1 - y0)).clamp(y1, y0)
    }

    /// Smallest squared distance at which the model falls to `level` or
    /// below, or `None` if it never does.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let xs = &self.breakpoints;
        let ys = &self.values;
        if ys[0] <= level {
            return Some(xs[0]);
        }
        for i in 1..xs.len() {
            if ys[i] <= level {
                let t = (ys[i - 1] - level) / (ys[i - 1] - ys[i]);
                return Some(xs[i - 1] + t * (xs[i] - xs[i - 1]));
            }
        }
        None
    }

    /// Two-column CSV with a header row, nine significant digits.
    ///
    /// Breakpoints that collide after rounding keep their first occurrence.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dist2,value\n");
        let mut last: Option<String> = None;
        for (x, y) in self.breakpoints.iter().zip(&self.values) {
            let xs = format!("{x:.8e}");
            if last.as_deref() == Some(xs.as_str()) {
                continue;
            }
            let _ = writeln!(out, "{xs},{y:.8e}");
            last = Some(xs);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("dist2,value") => {}
            other => {
                return Err(Error::format(
                    "model csv",
                    format!("expected header 'dist2,value', found {other:?}"),
                ))
            }
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| {
                Error::format("model csv", format!("line {}: expected two columns", n + 2))
            })?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::format("model csv", format!("line {}: {e}", n + 2))
                })
            };
            xs.push(parse(a)?);
            ys.push(parse(b)?);
        }
        Self::new(xs, ys).map_err(|e| Error::format("model csv", e.to_string()))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::atomic::write_atomic(path, self.to_csv().as_bytes())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Equal-distance groups after pre-pooling: `(x, sum of y, count)`.
fn pool_equal_x(points: &mut [(f64, f64)]) -> Vec<(f64, f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for &(x, y) in points.iter() {
        match groups.last_mut() {
            Some(g) if g.0 == x => {
                g.1 += y;
                g.2 += 1.0;
            }
            _ => groups.push((x, y, 1.0)),
        }
    }
    groups
}

struct Block {
    sum: f64,
    weight: f64,
    first: usize,
    last: usize,
}

impl Block {
    fn mean(&self) -> f64 {
        self.sum / self.weight
    }
}

fn pav_non_increasing(groups: &[(f64, f64, f64)]) -> PositiveModel {
    let mut blocks: Vec<Block> = Vec::with_capacity(groups.len());
    for (i, &(_, sum, weight)) in groups.iter().enumerate() {
        blocks.push(Block {
            sum,
            weight,
            first: i,
            last: i,
        });
        while blocks.len() >= 2 {
            let n = blocks.len();
            let (prev, cur) = (&blocks[n - 2], &blocks[n - 1]);
            // a later block may not have a larger mean
            if cur.sum * prev.weight <= prev.sum * cur.weight {
                break;
            }
            let cur = blocks.pop().unwrap();
            let prev = blocks.last_mut().unwrap();
            prev.sum += cur.sum;
            prev.weight += cur.weight;
            prev.last = cur.last;
        }
    }

    let mut breakpoints = Vec::with_capacity(2 * blocks.len());
    let mut values = Vec::with_capacity(2 * blocks.len());
    let mut prev_value = f64::INFINITY;
    for b in &blocks {
        // pooled means are non-increasing up to rounding; enforce it exactly
        let v = b.mean().clamp(0.0, 1.0).min(prev_value);
        prev_value = v;
        breakpoints.push(groups[b.first].0);
        values.push(v);
        if b.last != b.first {
            breakpoints.push(groups[b.last].0);
            values.push(v);
        }
    }
    PositiveModel {
        breakpoints,
        values,
    }
}

/// Least-squares non-increasing fit of binary labels against squared
/// distance.
pub fn fit_isotonic(pairs: &[LabeledPair]) -> Result<PositiveModel> {
    if pairs.is_empty() {
        return Err(Error::invalid("cannot fit a model on zero pairs"));
    }
    let mut points = Vec::with_capacity(pairs.len());
    for p in pairs {
        if p.label > 1 {
            return Err(Error::invalid(format!("label {} is not 0 or 1", p.label)));
        }
        if !p.dist2.is_finite() || p.dist2 < 0.0 {
            return Err(Error::invalid(format!("invalid dist2 {}", p.dist2)));
        }
        points.push((p.dist2, p.label as f64));
    }
    Ok(pav_non_increasing(&pool_equal_x(&mut points)))
}

/// Same fit for real-valued targets in `[0, 1]`.
pub fn fit_isotonic_values(xs: &[f64], ys: &[f64]) -> Result<PositiveModel> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("xs and ys differ in length"));
    }
    if xs.is_empty() {
        return Err(Error::invalid("cannot fit a model on zero points"));
    }
    if xs.iter().any(|x| !x.is_finite()) || ys.iter().any(|y| !(0.0..=1.0).contains(y)) {
        return Err(Error::invalid("xs must be finite and ys within [0, 1]"));
    }
    let mut points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    Ok(pav_non_increasing(&pool_equal_x(&mut points)))
}

/// `Σ (f(x_i) - y_i)²` over the pairs.
pub fn squared_error(model: &PositiveModel, pairs: &[LabeledPair]) -> f64 {
    pairs
        .iter()
        .map(|p| {
            let e = model.eval(p.dist2) - p.label as f64;
            e * e
        })
        .sum()
}

/// Labeled training pairs from `queries × db`: every pair closer than
/// `r2_max`, plus up to `n_far_negatives` pairs drawn uniformly without
/// replacement from the rest. Both groups are labeled by `oracle(query, db)`
/// and returned in `(query, db)` order, near pairs first.
pub fn collect_training_pairs<F>(
    queries: &VectorDataset,
    db: &VectorDataset,
    oracle: F,
    r2_max: f64,
    n_far_negatives: usize,
    seed_root: u64,
) -> Result<Vec<LabeledPair>>
where
    F: Fn(u32, u32) -> bool + Sync,
{
    queries.check_dim(db)?;
    if r2_max.is_nan() || r2_max < 0.0 {
        return Err(Error::invalid(format!("r2_max {r2_max} must be non-negative")));
    }
    let mut near = brute_force_range(queries, db, r2_max)?.into_vec();
    near.sort_by_key(|p| (p.query, p.db));
    let mut out: Vec<LabeledPair> = near
        .iter()
        .map(|p| LabeledPair::new(p.dist2, oracle(p.query, p.db)))
        .collect();

    let n_db = db.len() as u64;
    let total = queries.len() as u64 * n_db;
    let far_count = total - near.len() as u64;
    if n_far_negatives == 0 || far_count == 0 {
        return Ok(out);
    }

    let dist = |idx: u64| {
        let (q, x) = ((idx / n_db) as usize, (idx % n_db) as usize);
        l2sq(queries.row(q), db.row(x))
    };

    let mut chosen: Vec<u64> = if far_count <= 4 * n_far_negatives as u64 {
        let all: Vec<u64> = (0..total).filter(|&i| dist(i) >= r2_max).collect();
        if all.len() <= n_far_negatives {
            all
        } else {
            let mut rng = seed::rng(seed_root, seed::stage::TRAIN_PAIRS, 0);
            rand::seq::index::sample(&mut rng, all.len(), n_far_negatives)
                .into_iter()
                .map(|i| all[i])
                .collect()
        }
    } else {
        let mut rng = seed::rng(seed_root, seed::stage::TRAIN_PAIRS, 1);
        let mut seen = HashSet::with_capacity(n_far_negatives);
        let mut picked = Vec::with_capacity(n_far_negatives);
        while picked.len() < n_far_negatives {
            let idx = rng.random_range(0..total);
            if seen.insert(idx) && dist(idx) >= r2_max {
                picked.push(idx);
            }
        }
        picked
    };
    chosen.sort_unstable();
    out.extend(chosen.into_iter().map(|idx| {
        let (q, x) = ((idx / n_db) as u32, (idx % n_db) as u32);
        LabeledPair::new(dist(idx), oracle(q, x))
    }));
    Ok(out)
}
