//! Exhaustive search: the reference every approximate index is checked
//! against.

use std::ops::Range;

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::pairs::PairList;
use crate::search::{self, SearchIndex};

/// Scans every database row with exact squared-L2 distances.
#[derive(Clone, Copy, Debug)]
pub struct ExactIndex<'a> {
    db: &'a VectorDataset,
}

impl<'a> ExactIndex<'a> {
    pub fn new(db: &'a VectorDataset) -> Self {
        Self { db }
    }

    pub fn db(&self) -> &'a VectorDataset {
        self.db
    }
}

impl SearchIndex for ExactIndex<'_> {
    fn dim(&self) -> usize {
        self.db.dim()
    }

    fn db_len(&self) -> usize {
        self.db.len()
    }

    #[inline]
    fn scan<F: FnMut(u32, f64)>(&self, query: &[f32], mut visit: F) {
        for (id, row) in self.db.rows().enumerate() {
            visit(id as u32, l2sq(query, row));
        }
    }

    fn scan_block<F: FnMut(usize, u32, f64)>(&self, queries: &VectorDataset, range: Range<usize>, mut visit: F) {
        let n = self.db.len();
        let mut start = 0;
        while start < n {
            let end = (start + DB_TILE).min(n);
            for qi in range.clone() {
                let q = queries.row(qi);
                for id in start..end {
                    visit(qi, id as u32, l2sq(q, self.db.row(id)));
                }
            }
            start = end;
        }
    }
}

/// Database rows per cache tile in block scans.
const DB_TILE: usize = 1024;

/// Exactly `k` nearest rows per query, ties by ascending db id, sorted by
/// `(query, dist2, db)`.
pub fn brute_force_knn(queries: &VectorDataset, db: &VectorDataset, k: usize) -> Result<PairList> {
    queries.check_dim(db)?;
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if k > db.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds database size {}",
            db.len()
        )));
    }
    search::knn_search(&ExactIndex::new(db), queries, k)
}

/// All pairs with `dist2 < r2`, sorted by `(query, dist2, db)`.
pub fn brute_force_range(queries: &VectorDataset, db: &VectorDataset, r2: f64) -> Result<PairList> {
    queries.check_dim(db)?;
    if r2.is_nan() || r2 < 0.0 {
        return Err(Error::invalid(format!("radius {r2} must be non-negative")));
    }
    search::range_search(&ExactIndex::new(db), queries, r2)
}
