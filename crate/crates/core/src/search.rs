//! The searchable-index abstraction and the selection primitives built on it.
//!
//! An index only has to enumerate the candidates it would surface for a
//! query, each with the distance it would report. k-NN lists, range lists
//! and global top-B shortlists are all derived from that one scan, so the
//! exact index and every IVF variant share the same selection and
//! tie-breaking rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::Range;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::pairs::{Pair, PairList};
use crate::par;

pub trait SearchIndex: Sync {
    fn dim(&self) -> usize;

    /// Number of database vectors the index was built over.
    fn db_len(&self) -> usize;

    /// Calls `visit(db_id, distance)` once per candidate surfaced for `query`.
    fn scan<F: FnMut(u32, f64)>(&self, query: &[f32], visit: F);

    /// Calls `visit(query_id, db_id, distance)` for every query in `range`.
    /// Visit order is unspecified; indexes override this to tile for cache.
    fn scan_block<F: FnMut(usize, u32, f64)>(&self, queries: &VectorDataset, range: Range<usize>, mut visit: F) {
        for qi in range {
            self.scan(queries.row(qi), |id, d| visit(qi, id, d));
        }
    }
}

/// Queries handled together by one [`SearchIndex::scan_block`] call.
pub(crate) const QUERY_BLOCK: usize = 64;

fn block_range(b: usize, n: usize) -> Range<usize> {
    b * QUERY_BLOCK..((b + 1) * QUERY_BLOCK).min(n)
}

#[derive(Clone, Copy, Debug)]
struct Local {
    dist2: f64,
    id: u32,
}

impl PartialEq for Local {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Local {}
impl PartialOrd for Local {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Local {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.id.cmp(&other.id))
    }
}

/// Keeps the `k` smallest `(dist2, id)` keys seen so far.
pub(crate) struct TopK {
    k: usize,
    heap: BinaryHeap<Local>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k.min(1 << 16) + 1),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, id: u32, dist2: f64) {
        if self.k == 0 {
            return;
        }
        let key = Local { dist2, id };
        if self.heap.len() < self.k {
            self.heap.push(key);
        } else if let Some(mut top) = self.heap.peek_mut() {
            if key < *top {
                *top = key;
            }
        }
    }

    /// Ascending by `(dist2, id)`.
    pub(crate) fn into_sorted(self) -> Vec<(u32, f64)> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|l| (l.id, l.dist2))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
struct Global(Pair);

impl PartialEq for Global {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Global {}
impl PartialOrd for Global {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Global {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_global(&other.0)
    }
}

struct GlobalTop {
    n: usize,
    heap: BinaryHeap<Global>,
}

impl GlobalTop {
    fn new(n: usize) -> Self {
        Self {
            n,
            heap: BinaryHeap::new(),
        }
    }

    #[inline]
    fn push(&mut self, pair: Pair) {
        if self.n == 0 {
            return;
        }
        if self.heap.len() < self.n {
            self.heap.push(Global(pair));
        } else if let Some(mut top) = self.heap.peek_mut() {
            if pair.cmp_global(&top.0) == Ordering::Less {
                *top = Global(pair);
            }
        }
    }

    fn merge(mut self, mut other: Self) -> Self {
        if self.heap.len() < other.heap.len() {
            std::mem::swap(&mut self, &mut other);
        }
        for g in other.heap {
            self.push(g.0);
        }
        self
    }
}

fn check_queries<I: SearchIndex>(index: &I, queries: &VectorDataset) -> Result<()> {
    if queries.dim() != index.dim() {
        return Err(Error::DimensionMismatch {
            expected: index.dim(),
            got: queries.dim(),
        });
    }
    if queries.len() > u32::MAX as usize {
        return Err(Error::invalid("too many queries for 32-bit ids"));
    }
    Ok(())
}

/// Up to `k` candidates per query with the smallest reported distance, ties
/// broken by ascending database id. Sorted canonically.
pub fn knn_search<I: SearchIndex>(index: &I, queries: &VectorDataset, k: usize) -> Result<PairList> {
    check_queries(index, queries)?;
    let n = queries.len();
    let per_block = par::map_range(n.div_ceil(QUERY_BLOCK), |b| {
        let r = block_range(b, n);
        let start = r.start;
        let mut tops: Vec<TopK> = r.clone().map(|_| TopK::new(k)).collect();
        index.scan_block(queries, r, |qi, id, d| tops[qi - start].push(id, d));
        tops.into_iter().map(TopK::into_sorted).collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(n * k);
    for (qi, list) in per_block.into_iter().flatten().enumerate() {
        out.extend(list.into_iter().map(|(id, d)| Pair::new(qi as u32, id, d)));
    }
    Ok(PairList::from_vec_unchecked(out))
}

/// Every candidate with reported distance strictly below `r2`. Sorted
/// canonically.
pub fn range_search<I: SearchIndex>(index: &I, queries: &VectorDataset, r2: f64) -> Result<PairList> {
    check_queries(index, queries)?;
    let n = queries.len();
    let per_block = par::map_range(n.div_ceil(QUERY_BLOCK), |b| {
        let mut hits = Vec::new();
        index.scan_block(queries, block_range(b, n), |qi, id, d| {
            if d < r2 {
                hits.push(Pair::new(qi as u32, id, d));
            }
        });
        hits.sort_by(Pair::cmp_canonical);
        hits
    });
    Ok(PairList::from_vec_unchecked(per_block.concat()))
}

/// The `n` globally smallest candidates across all queries, ascending in
/// `(dist2, query, db)` order.
pub fn global_top<I: SearchIndex>(index: &I, queries: &VectorDataset, n: usize) -> Result<Vec<Pair>> {
    check_queries(index, queries)?;
    let nq = queries.len();
    let top = par::fold_reduce(
        nq.div_ceil(QUERY_BLOCK),
        || GlobalTop::new(n),
        |mut acc, b| {
            index.scan_block(queries, block_range(b, nq), |qi, id, d| {
                acc.push(Pair::new(qi as u32, id, d))
            });
            acc
        },
        GlobalTop::merge,
    );
    Ok(top.heap.into_sorted_vec().into_iter().map(|g| g.0).collect())
}

/// Every candidate the index surfaces, with its reported distance.
pub fn collect_candidates<I: SearchIndex>(index: &I, queries: &VectorDataset) -> Result<PairList> {
    range_search(index, queries, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topk_keeps_smallest_with_id_ties() {
        let mut t = TopK::new(2);
        for (id, d) in [(5, 1.0), (3, 1.0), (1, 2.0), (4, 0.5)] {
            t.push(id, d);
        }
        assert_eq!(t.into_sorted(), vec![(4, 0.5), (3, 1.0)]);
        let mut z = TopK::new(0);
        z.push(0, 0.0);
        assert!(z.into_sorted().is_empty());
    }

    #[test]
    fn global_top_merge_is_order_free() {
        let pairs: Vec<Pair> = (0..50)
            .map(|i| Pair::new(i % 7, i, ((i * 37) % 11) as f64))
            .collect();
        let mut a = GlobalTop::new(10);
        let mut b = GlobalTop::new(10);
        let mut all = GlobalTop::new(10);
        for (i, p) in pairs.iter().enumerate() {
            if i % 3 == 0 { a.push(*p) } else { b.push(*p) }
            all.push(*p);
        }
        let merged: Vec<Pair> = a.merge(b).heap.into_sorted_vec().into_iter().map(|g| g.0).collect();
        let direct: Vec<Pair> = all.heap.into_sorted_vec().into_iter().map(|g| g.0).collect();
        assert_eq!(merged, direct);
    }
}
