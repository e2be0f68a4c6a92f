//! Range search metric: the expected number of verified positives in a
//! shortlist, and the two ways of spending a verification budget across a
//! query batch.
//!
//! Shortlists may come from approximate indexes whose reported distances
//! are codec distances. Selection uses whatever the index reports; scoring
//! always recomputes exact squared distances from the raw vectors.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::isotonic::PositiveModel;
use crate::pairs::{Pair, PairList};
use crate::search::{self, SearchIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// One global distance threshold calibrated to the budget.
    Range,
    /// `floor(B / n_queries)` nearest results per query.
    Knn,
}

impl BudgetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BudgetMode::Range => "range",
            BudgetMode::Knn => "knn",
        }
    }
}

impl FromStr for BudgetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "range" => Ok(BudgetMode::Range),
            "knn" => Ok(BudgetMode::Knn),
            _ => Err(Error::invalid(format!("unknown budget mode '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetConfig {
    pub budget: usize,
    pub mode: BudgetMode,
}

impl BudgetConfig {
    pub fn new(budget: usize, mode: BudgetMode) -> Result<Self> {
        if budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        Ok(Self { budget, mode })
    }
}

/// `Σ f(dist2(q, x))` over the shortlist, with distances supplied by
/// `exact_dist`. Terms are summed in `(query, db)` order so the score does
/// not depend on how the shortlist is ordered.
pub fn rsm_score_with<F>(model: &PositiveModel, shortlist: &PairList, exact_dist: F) -> Result<f64>
where
    F: Fn(u32, u32) -> Result<f64>,
{
    let mut keys: Vec<(u32, u32)> = shortlist.iter().map(|p| (p.query, p.db)).collect();
    keys.sort_unstable();
    let mut total = 0.0;
    for (q, x) in keys {
        total += model.eval(exact_dist(q, x)?);
    }
    Ok(total)
}

/// RSM of `shortlist` with exact distances recomputed from `queries` and `db`.
pub fn rsm_score(
    model: &PositiveModel,
    shortlist: &PairList,
    queries: &VectorDataset,
    db: &VectorDataset,
) -> Result<f64> {
    queries.check_dim(db)?;
    shortlist.validate_ids(queries.len(), db.len())?;
    rsm_score_with(model, shortlist, |q, x| {
        Ok(l2sq(queries.row(q as usize), db.row(x as usize)))
    })
}

/// Threshold `r` such that keeping values `< r` keeps at most `budget`
/// entries: the `(budget + 1)`-th smallest value, or `+∞` when the budget
/// covers the whole stream. Values tied with the threshold are all dropped.
pub fn calibrate_threshold(dist2_stream: &[f64], budget: usize) -> f64 {
    if budget >= dist2_stream.len() {
        return f64::INFINITY;
    }
    let mut v = dist2_stream.to_vec();
    let (_, nth, _) = v.select_nth_unstable_by(budget, f64::total_cmp);
    *nth
}

/// Applies the strict-threshold rule to a prefix sorted in global order:
/// keeps entries strictly below the `(budget + 1)`-th distance.
fn threshold_prefix(sorted: &[Pair], budget: usize) -> &[Pair] {
    if budget >= sorted.len() {
        return sorted;
    }
    let threshold = sorted[budget].dist2;
    let keep = sorted[..budget].partition_point(|p| p.dist2 < threshold);
    &sorted[..keep]
}

fn canonical(mut pairs: Vec<Pair>) -> PairList {
    pairs.sort_by(Pair::cmp_canonical);
    PairList::from_vec_unchecked(pairs)
}

/// Builds the shortlist that spends `config.budget` verifications.
pub fn bulk_shortlist<I: SearchIndex>(
    index: &I,
    queries: &VectorDataset,
    config: BudgetConfig,
) -> Result<PairList> {
    match config.mode {
        BudgetMode::Range => {
            let top = search::global_top(index, queries, config.budget + 1)?;
            Ok(canonical(threshold_prefix(&top, config.budget).to_vec()))
        }
        BudgetMode::Knn => {
            let k = config.budget / queries.len().max(1);
            if k == 0 {
                return Err(Error::invalid(format!(
                    "budget {} is smaller than the query count {}",
                    config.budget,
                    queries.len()
                )));
            }
            search::knn_search(index, queries, k)
        }
    }
}

/// Shortlists for an ascending list of budgets, computed from one search
/// at the largest budget. A budget of 0 (or a k-NN budget below the query
/// count) yields an empty shortlist.
pub fn budget_shortlists<I: SearchIndex>(
    index: &I,
    queries: &VectorDataset,
    budgets: &[usize],
    mode: BudgetMode,
) -> Result<Vec<(usize, PairList)>> {
    if budgets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("budgets must be ascending"));
    }
    let Some(&max_budget) = budgets.last() else {
        return Ok(Vec::new());
    };
    let nq = queries.len().max(1);
    match mode {
        BudgetMode::Range => {
            let top = search::global_top(index, queries, max_budget + 1)?;
            Ok(budgets
                .iter()
                .map(|&b| (b, canonical(threshold_prefix(&top, b).to_vec())))
                .collect())
        }
        BudgetMode::Knn => {
            let kmax = max_budget / nq;
            let full = search::knn_search(index, queries, kmax)?;
            Ok(budgets
                .iter()
                .map(|&b| {
                    let k = b / nq;
                    let mut rank = 0usize;
                    let mut last_q = u32::MAX;
                    let kept: Vec<Pair> = full
                        .iter()
                        .filter(|p| {
                            if p.query != last_q {
                                last_q = p.query;
                                rank = 0;
                            }
                            rank += 1;
                            rank <= k
                        })
                        .copied()
                        .collect();
                    (b, PairList::from_vec_unchecked(kept))
                })
                .collect())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub budget: usize,
    pub rsm: f64,
    pub realized_pairs: usize,
}

/// RSM and realized shortlist size at each budget.
pub fn positive_curve<I: SearchIndex>(
    model: &PositiveModel,
    index: &I,
    queries: &VectorDataset,
    db: &VectorDataset,
    budgets: &[usize],
    mode: BudgetMode,
) -> Result<Vec<CurvePoint>> {
    budget_shortlists(index, queries, budgets, mode)?
        .into_iter()
        .map(|(budget, list)| {
            Ok(CurvePoint {
                budget,
                rsm: rsm_score(model, &list, queries, db)?,
                realized_pairs: list.len(),
            })
        })
        .collect()
}
