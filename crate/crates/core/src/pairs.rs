//! `(query, db, dist2)` result lists.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pair {
    pub query: u32,
    pub db: u32,
    pub dist2: f64,
}

impl Pair {
    pub fn new(query: u32, db: u32, dist2: f64) -> Self {
        Self { query, db, dist2 }
    }

    /// Canonical order: `(query, dist2, db)`.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.query
            .cmp(&other.query)
            .then(self.dist2.total_cmp(&other.dist2))
            .then(self.db.cmp(&other.db))
    }

    /// Global order used for budget selection: `(dist2, query, db)`.
    pub fn cmp_global(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.query.cmp(&other.query))
            .then(self.db.cmp(&other.db))
    }
}

/// Shortlist or result list shared by every search and scoring routine.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairList {
    entries: Vec<Pair>,
}

impl PairList {
    /// Wraps `entries` after checking distances are non-negative and no
    /// `(query, db)` pair repeats. Order is preserved.
    pub fn new(entries: Vec<Pair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for p in &entries {
            if !(p.dist2 >= 0.0) {
                return Err(Error::invalid(format!(
                    "pair ({}, {}) has invalid dist2 {}",
                    p.query, p.db, p.dist2
                )));
            }
            if !seen.insert((p.query, p.db)) {
                return Err(Error::invalid(format!(
                    "duplicate pair ({}, {})",
                    p.query, p.db
                )));
            }
        }
        Ok(Self { entries })
    }

    /// For producers that already guarantee the invariants.
    pub(crate) fn from_vec_unchecked(entries: Vec<Pair>) -> Self {
        Self { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pair> {
        self.entries.iter()
    }

    pub fn as_slice(&self) -> &[Pair] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<Pair> {
        self.entries
    }

    pub fn sort_canonical(&mut self) {
        self.entries.sort_by(Pair::cmp_canonical);
    }

    /// Checks every id against the query and database sizes.
    pub fn validate_ids(&self, n_queries: usize, n_db: usize) -> Result<()> {
        for p in &self.entries {
            if p.query as usize >= n_queries {
                return Err(Error::IdOutOfRange {
                    what: "query",
                    id: p.query as u64,
                    len: n_queries,
                });
            }
            if p.db as usize >= n_db {
                return Err(Error::IdOutOfRange {
                    what: "database",
                    id: p.db as u64,
                    len: n_db,
                });
            }
        }
        Ok(())
    }

    /// Number of entries per query id.
    pub fn per_query_counts(&self, n_queries: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n_queries];
        for p in &self.entries {
            if let Some(c) = counts.get_mut(p.query as usize) {
                *c += 1;
            }
        }
        counts
    }

    pub fn id_pairs(&self) -> HashSet<(u32, u32)> {
        self.entries.iter().map(|p| (p.query, p.db)).collect()
    }
}

impl<'a> IntoIterator for &'a PairList {
    type Item = &'a Pair;
    type IntoIter = std::slice::Iter<'a, Pair>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_negative_distances() {
        assert!(PairList::new(vec![Pair::new(0, 1, 0.5), Pair::new(0, 1, 0.7)]).is_err());
        assert!(PairList::new(vec![Pair::new(0, 1, -0.1)]).is_err());
        assert!(PairList::new(vec![Pair::new(0, 1, f64::NAN)]).is_err());
        assert!(PairList::new(vec![Pair::new(0, 1, 0.5), Pair::new(1, 1, 0.5)]).is_ok());
    }

    #[test]
    fn canonical_sort() {
        let mut l = PairList::new(vec![
            Pair::new(1, 0, 0.1),
            Pair::new(0, 5, 0.3),
            Pair::new(0, 2, 0.3),
            Pair::new(0, 9, 0.2),
        ])
        .unwrap();
        l.sort_canonical();
        let ids: Vec<_> = l.iter().map(|p| (p.query, p.db)).collect();
        assert_eq!(ids, vec![(0, 9), (0, 2), (0, 5), (1, 0)]);
        assert_eq!(l.per_query_counts(3), vec![3, 1, 0]);
    }

    #[test]
    fn validates_ids() {
        let l = PairList::new(vec![Pair::new(2, 0, 0.1)]).unwrap();
        assert!(l.validate_ids(2, 1).is_err());
        assert!(l.validate_ids(3, 1).is_ok());
    }
}
