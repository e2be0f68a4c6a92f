//! Inverted-file index: k-means partitions, a per-entry codec, and an
//! exact or PQ-prefiltered coarse assigner.

use std::fmt;

use crate::dataset::{l2sq, VectorDataset};
use crate::error::{Error, Result};
use crate::index::itq::{hamming, ItqModel};
use crate::index::kmeans::Centroids;
use crate::index::pq::{train_pq, PqCodebook};
use crate::par;
use crate::search::{SearchIndex, TopK};

pub const DEFAULT_RERANK_FACTOR: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum Codec {
    /// Raw little-endian `f32` values.
    Flat,
    Pq(PqCodebook),
    Itq(ItqModel),
}

impl Codec {
    pub fn code_size(&self, dim: usize) -> usize {
        match self {
            Codec::Flat => dim * 4,
            Codec::Pq(cb) => cb.code_size(),
            Codec::Itq(m) => m.code_size(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Codec::Flat => None,
            Codec::Pq(cb) => Some(cb.dim()),
            Codec::Itq(m) => Some(m.dim()),
        }
    }

    /// `Flat`, `PQ{m}x{bits}` or `ITQ{bits}`.
    pub fn name(&self) -> String {
        match self {
            Codec::Flat => "Flat".to_string(),
            Codec::Pq(cb) => format!("PQ{}x{}", cb.m(), cb.bits()),
            Codec::Itq(m) => format!("ITQ{}", m.n_bits()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Assigner {
    Exact,
    /// PQ distances over the centroids pick `rerank_factor × nprobe`
    /// candidates, which are re-ranked exactly.
    PqApprox {
        codebook: PqCodebook,
        rerank_factor: usize,
    },
}

impl fmt::Display for Assigner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assigner::Exact => write!(f, "exact"),
            Assigner::PqApprox {
                codebook,
                rerank_factor,
            } => write!(f, "pq_approx(PQ{}x{}, rerank {})", codebook.m(), codebook.bits(), rerank_factor),
        }
    }
}

/// PQ-prefiltered assigner trained on the centroids themselves.
pub fn train_pq_assigner(
    centroids: &Centroids,
    m: usize,
    bits: u32,
    rerank_factor: usize,
    seed_root: u64,
) -> Result<Assigner> {
    if rerank_factor == 0 {
        return Err(Error::invalid("rerank_factor must be positive"));
    }
    let codebook = train_pq(centroids.vectors(), m, bits, seed_root)?;
    Ok(Assigner::PqApprox {
        codebook,
        rerank_factor,
    })
}

/// Encoded centroid table for the PQ assigner.
#[derive(Clone, Debug)]
struct AssignerCodes {
    codes: Vec<u8>,
    code_size: usize,
}

fn encode_all(cb: &PqCodebook, data: &VectorDataset) -> AssignerCodes {
    let code_size = cb.code_size();
    let mut codes = vec![0u8; data.len() * code_size];
    for (i, x) in data.rows().enumerate() {
        cb.encode_into(x, &mut codes[i * code_size..(i + 1) * code_size]);
    }
    AssignerCodes { codes, code_size }
}

fn exact_top(centroids: &Centroids, q: &[f32], candidates: impl Iterator<Item = usize>, n: usize) -> Vec<u32> {
    let mut top = TopK::new(n);
    for c in candidates {
        top.push(c as u32, l2sq(q, centroids.get(c)));
    }
    top.into_sorted().into_iter().map(|(id, _)| id).collect()
}

fn probe_lists(
    assigner: &Assigner,
    codes: Option<&AssignerCodes>,
    centroids: &Centroids,
    q: &[f32],
    nprobe: usize,
) -> Vec<u32> {
    let k = centroids.k();
    match (assigner, codes) {
        (
            Assigner::PqApprox {
                codebook,
                rerank_factor,
            },
            Some(codes),
        ) => {
            let depth = rerank_factor.saturating_mul(nprobe).min(k);
            if depth >= k {
                return exact_top(centroids, q, 0..k, nprobe);
            }
            let table = codebook.adc_tables_unchecked(q);
            let mut pre = TopK::new(depth);
            for (c, code) in codes.codes.chunks_exact(codes.code_size).enumerate() {
                pre.push(c as u32, table.distance(code));
            }
            let shortlist = pre.into_sorted();
            exact_top(centroids, q, shortlist.into_iter().map(|(c, _)| c as usize), nprobe)
        }
        _ => exact_top(centroids, q, 0..k, nprobe),
    }
}

/// The `nprobe` partitions each query visits, nearest first.
pub fn coarse_assign(
    assigner: &Assigner,
    centroids: &Centroids,
    queries: &VectorDataset,
    nprobe: usize,
) -> Result<Vec<Vec<u32>>> {
    if queries.dim() != centroids.dim() {
        return Err(Error::DimensionMismatch {
            expected: centroids.dim(),
            got: queries.dim(),
        });
    }
    check_nprobe(nprobe, centroids.k())?;
    let codes = match assigner {
        Assigner::PqApprox { codebook, .. } => {
            check_assigner_dim(codebook, centroids.dim())?;
            Some(encode_all(codebook, centroids.vectors()))
        }
        Assigner::Exact => None,
    };
    Ok(par::map_range(queries.len(), |i| {
        probe_lists(assigner, codes.as_ref(), centroids, queries.row(i), nprobe)
    }))
}

fn check_nprobe(nprobe: usize, k: usize) -> Result<()> {
    if nprobe == 0 || nprobe > k {
        return Err(Error::invalid(format!("nprobe must be in 1..={k}, got {nprobe}")));
    }
    Ok(())
}

fn check_assigner_dim(cb: &PqCodebook, dim: usize) -> Result<()> {
    if cb.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: cb.dim(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvertedList {
    pub ids: Vec<u32>,
    /// `ids.len() × code_size` bytes.
    pub codes: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct IvfIndex {
    dim: usize,
    centroids: Centroids,
    codec: Codec,
    residual: bool,
    assigner: Assigner,
    assigner_codes: Option<AssignerCodes>,
    lists: Vec<InvertedList>,
    db_len: usize,
}

/// Assigns every vector to its exactly-nearest centroid and encodes it (or
/// its residual to that centroid).
pub fn build_ivf(db: &VectorDataset, centroids: Centroids, codec: Codec, residual: bool) -> Result<IvfIndex> {
    let dim = db.dim();
    if centroids.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: centroids.dim(),
        });
    }
    if let Some(cd) = codec.dim() {
        if cd != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: cd });
        }
    }
    if residual && !matches!(codec, Codec::Pq(_)) {
        return Err(Error::invalid(format!(
            "residual encoding requires a PQ codec, got {}",
            codec.name()
        )));
    }
    if db.len() > u32::MAX as usize {
        return Err(Error::invalid("database too large for 32-bit ids"));
    }

    let assignment = centroids.assign(db);
    let code_size = codec.code_size(dim);
    let codes: Vec<Vec<u8>> = par::map_range(db.len(), |i| {
        let x = db.row(i);
        let mut out = vec![0u8; code_size];
        match &codec {
            Codec::Flat => {
                for (chunk, v) in out.chunks_exact_mut(4).zip(x) {
                    chunk.copy_from_slice(&v.to_le_bytes());
                }
            }
            Codec::Pq(cb) => {
                if residual {
                    let c = centroids.get(assignment[i].0 as usize);
                    let r: Vec<f32> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                    cb.encode_into(&r, &mut out);
                } else {
                    cb.encode_into(x, &mut out);
                }
            }
            Codec::Itq(m) => m.encode_into(x, &mut out),
        }
        out
    });

    let mut lists = vec![InvertedList::default(); centroids.k()];
    for (i, (&(c, _), code)) in assignment.iter().zip(codes).enumerate() {
        let list = &mut lists[c as usize];
        list.ids.push(i as u32);
        list.codes.extend_from_slice(&code);
    }
    Ok(IvfIndex {
        dim,
        centroids,
        codec,
        residual,
        assigner: Assigner::Exact,
        assigner_codes: None,
        lists,
        db_len: db.len(),
    })
}

impl IvfIndex {
    /// Assembles an index from stored parts; used when loading from disk.
    pub fn from_parts(
        centroids: Centroids,
        codec: Codec,
        residual: bool,
        assigner: Assigner,
        lists: Vec<InvertedList>,
        db_len: usize,
    ) -> Result<Self> {
        let dim = centroids.dim();
        if lists.len() != centroids.k() {
            return Err(Error::format(
                "ivf",
                format!("{} lists for {} centroids", lists.len(), centroids.k()),
            ));
        }
        if residual && !matches!(codec, Codec::Pq(_)) {
            return Err(Error::format("ivf", "residual encoding requires a PQ codec"));
        }
        let code_size = codec.code_size(dim);
        let mut seen = vec![false; db_len];
        for list in &lists {
            if list.codes.len() != list.ids.len() * code_size {
                return Err(Error::format("ivf", "list code bytes do not match id count"));
            }
            for &id in &list.ids {
                let slot = seen.get_mut(id as usize).ok_or(Error::IdOutOfRange {
                    what: "db",
                    id: id as u64,
                    len: db_len,
                })?;
                if *slot {
                    return Err(Error::format("ivf", format!("db id {id} stored twice")));
                }
                *slot = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::format("ivf", format!("db id {missing} is in no list")));
        }
        let index = IvfIndex {
            dim,
            centroids,
            codec,
            residual,
            assigner: Assigner::Exact,
            assigner_codes: None,
            lists,
            db_len,
        };
        index.with_assigner(assigner)
    }

    pub fn with_assigner(mut self, assigner: Assigner) -> Result<Self> {
        self.assigner_codes = match &assigner {
            Assigner::Exact => None,
            Assigner::PqApprox {
                codebook,
                rerank_factor,
            } => {
                check_assigner_dim(codebook, self.dim)?;
                if *rerank_factor == 0 {
                    return Err(Error::invalid("rerank_factor must be positive"));
                }
                Some(encode_all(codebook, self.centroids.vectors()))
            }
        };
        self.assigner = assigner;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.centroids.k()
    }

    pub fn centroids(&self) -> &Centroids {
        &self.centroids
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn residual(&self) -> bool {
        self.residual
    }

    pub fn assigner(&self) -> &Assigner {
        &self.assigner
    }

    pub fn lists(&self) -> &[InvertedList] {
        &self.lists
    }

    pub fn code_size(&self) -> usize {
        self.codec.code_size(self.dim)
    }

    /// Partitions visited for `q`, nearest first.
    pub fn probe_for(&self, q: &[f32], nprobe: usize) -> Result<Vec<u32>> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: q.len(),
            });
        }
        check_nprobe(nprobe, self.k())?;
        Ok(probe_lists(&self.assigner, self.assigner_codes.as_ref(), &self.centroids, q, nprobe))
    }

    /// Decoded vector for entry `pos` of list `list`, with the centroid added
    /// back for residual codes. ITQ codes have no reconstruction.
    pub fn reconstruct(&self, list: usize, pos: usize) -> Result<Vec<f32>> {
        let l = self.lists.get(list).ok_or_else(|| Error::invalid(format!("no list {list}")))?;
        if pos >= l.ids.len() {
            return Err(Error::invalid(format!("list {list} has no entry {pos}")));
        }
        let cs = self.code_size();
        let code = &l.codes[pos * cs..(pos + 1) * cs];
        match &self.codec {
            Codec::Flat => Ok(decode_flat(code)),
            Codec::Pq(cb) => {
                let mut out = cb.decode(code)?;
                if self.residual {
                    for (o, c) in out.iter_mut().zip(self.centroids.get(list)) {
                        *o += c;
                    }
                }
                Ok(out)
            }
            Codec::Itq(_) => Err(Error::invalid("ITQ codes cannot be decoded to vectors")),
        }
    }

    /// Search view visiting `nprobe` partitions per query.
    pub fn probe(&self, nprobe: usize) -> Result<IvfProbe<'_>> {
        check_nprobe(nprobe, self.k())?;
        Ok(IvfProbe { index: self, nprobe })
    }

    fn scan_lists<F: FnMut(u32, f64)>(&self, q: &[f32], probes: &[u32], mut visit: F) {
        let cs = self.code_size();
        match &self.codec {
            Codec::Flat => {
                let mut buf = vec![0f32; self.dim];
                for &l in probes {
                    let list = &self.lists[l as usize];
                    for (&id, code) in list.ids.iter().zip(list.codes.chunks_exact(cs)) {
                        decode_flat_into(code, &mut buf);
                        visit(id, l2sq(q, &buf));
                    }
                }
            }
            Codec::Pq(cb) => {
                let shared = (!self.residual).then(|| cb.adc_tables_unchecked(q));
                for &l in probes {
                    let list = &self.lists[l as usize];
                    let local;
                    let table = match &shared {
                        Some(t) => t,
                        None => {
                            let c = self.centroids.get(l as usize);
                            let r: Vec<f32> = q.iter().zip(c).map(|(a, b)| a - b).collect();
                            local = cb.adc_tables_unchecked(&r);
                            &local
                        }
                    };
                    for (&id, code) in list.ids.iter().zip(list.codes.chunks_exact(cs)) {
                        visit(id, table.distance(code));
                    }
                }
            }
            Codec::Itq(m) => {
                let mut qcode = vec![0u8; cs];
                m.encode_into(q, &mut qcode);
                for &l in probes {
                    let list = &self.lists[l as usize];
                    for (&id, code) in list.ids.iter().zip(list.codes.chunks_exact(cs)) {
                        visit(id, hamming(&qcode, code) as f64);
                    }
                }
            }
        }
    }
}

fn decode_flat_into(code: &[u8], out: &mut [f32]) {
    for (o, chunk) in out.iter_mut().zip(code.chunks_exact(4)) {
        *o = f32::from_le_bytes(chunk.try_into().unwrap());
    }
}

fn decode_flat(code: &[u8]) -> Vec<f32> {
    let mut out = vec![0f32; code.len() / 4];
    decode_flat_into(code, &mut out);
    out
}

/// An [`IvfIndex`] with a fixed `nprobe`.
#[derive(Clone, Copy, Debug)]
pub struct IvfProbe<'a> {
    index: &'a IvfIndex,
    nprobe: usize,
}

impl IvfProbe<'_> {
    pub fn nprobe(&self) -> usize {
        self.nprobe
    }
}

impl SearchIndex for IvfProbe<'_> {
    fn dim(&self) -> usize {
        self.index.dim
    }

    fn db_len(&self) -> usize {
        self.index.db_len
    }

    fn scan<F: FnMut(u32, f64)>(&self, query: &[f32], visit: F) {
        let ix = self.index;
        let probes = probe_lists(&ix.assigner, ix.assigner_codes.as_ref(), &ix.centroids, query, self.nprobe);
        ix.scan_lists(query, &probes, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::sample_gaussian;
    use crate::exact::{brute_force_knn, brute_force_range};
    use crate::index::kmeans::train_kmeans;
    use crate::search::{collect_candidates, knn_search, range_search};
    use std::collections::HashSet;

    fn small_index(codec: Codec, residual: bool) -> (VectorDataset, IvfIndex) {
        let db = sample_gaussian(800, 8, 1).unwrap();
        let km = train_kmeans(&db, 16, 10, 2).unwrap();
        let ix = build_ivf(&db, km.centroids, codec, residual).unwrap();
        (db, ix)
    }

    #[test]
    fn exhaustive_flat_matches_brute_force() {
        let (db, ix) = small_index(Codec::Flat, false);
        let queries = sample_gaussian(50, 8, 3).unwrap();
        let full = ix.probe(ix.k()).unwrap();
        assert_eq!(
            knn_search(&full, &queries, 10).unwrap(),
            brute_force_knn(&queries, &db, 10).unwrap()
        );
        assert_eq!(
            range_search(&full, &queries, 2.0).unwrap(),
            brute_force_range(&queries, &db, 2.0).unwrap()
        );
    }

    #[test]
    fn partition_covers_every_id_once() {
        let (db, ix) = small_index(Codec::Flat, false);
        let mut all: Vec<u32> = ix.lists().iter().flat_map(|l| l.ids.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..db.len() as u32).collect::<Vec<_>>());
        for (c, list) in ix.lists().iter().enumerate() {
            for &id in &list.ids {
                assert_eq!(ix.centroids().nearest(db.row(id as usize)).0 as usize, c);
            }
        }
    }

    #[test]
    fn flat_decode_is_bit_exact() {
        let (db, ix) = small_index(Codec::Flat, false);
        for (c, list) in ix.lists().iter().enumerate() {
            for (pos, &id) in list.ids.iter().enumerate() {
                assert_eq!(ix.reconstruct(c, pos).unwrap(), db.row(id as usize));
            }
        }
    }

    #[test]
    fn nprobe_one_stays_in_nearest_partition() {
        let (_, ix) = small_index(Codec::Flat, false);
        let queries = sample_gaussian(20, 8, 4).unwrap();
        let one = ix.probe(1).unwrap();
        let cands = collect_candidates(&one, &queries).unwrap();
        for p in cands.iter() {
            let nearest = ix.centroids().nearest(queries.row(p.query as usize)).0;
            assert!(ix.lists()[nearest as usize].ids.contains(&p.db));
        }
    }

    #[test]
    fn candidates_grow_with_nprobe() {
        let (_, ix) = small_index(Codec::Flat, false);
        let queries = sample_gaussian(20, 8, 5).unwrap();
        let mut prev: HashSet<(u32, u32)> = HashSet::new();
        for nprobe in 1..=ix.k() {
            let cur = collect_candidates(&ix.probe(nprobe).unwrap(), &queries).unwrap().id_pairs();
            assert!(prev.is_subset(&cur));
            prev = cur;
        }
    }

    #[test]
    fn pq_distances_match_decoded_vectors() {
        let train = sample_gaussian(2000, 8, 7).unwrap();
        for residual in [false, true] {
            let cb = train_pq(&train, 4, 8, 1).unwrap();
            let (_, ix) = small_index(Codec::Pq(cb), residual);
            let q = sample_gaussian(1, 8, 8).unwrap();
            let q = q.row(0);
            let mut expected = std::collections::HashMap::new();
            for (c, list) in ix.lists().iter().enumerate() {
                for (pos, &id) in list.ids.iter().enumerate() {
                    expected.insert(id, crate::dataset::squared_l2(q, &ix.reconstruct(c, pos).unwrap()).unwrap());
                }
            }
            ix.probe(ix.k()).unwrap().scan(q, |id, d| {
                let e = expected[&id];
                assert!((d - e).abs() <= 1e-4 * e.max(1e-6), "residual={residual}: {d} vs {e}");
            });
        }
    }

    #[test]
    fn residual_reconstruction_is_exact_for_codeword_offsets() {
        // integer centroids and codewords: every residual is a codeword and
        // all arithmetic is exact
        let dim = 4;
        let centroids = Centroids::new(VectorDataset::new(dim, vec![0.0, 0.0, 0.0, 0.0, 100.0, 100.0, 100.0, 100.0]).unwrap()).unwrap();
        let codewords: Vec<f32> = (0..2 * 16 * 2).map(|i| ((i * 7) % 11) as f32 - 5.0).collect();
        let cb = PqCodebook::new(dim, 2, 4, codewords).unwrap();
        let mut rows = Vec::new();
        for c in [0.0f32, 100.0] {
            for a in 0..16 {
                let b = (a * 5) % 16;
                let mut x = Vec::new();
                x.extend(cb.codeword(0, a).iter().map(|v| v + c));
                x.extend(cb.codeword(1, b).iter().map(|v| v + c));
                rows.push(x);
            }
        }
        let db = VectorDataset::from_rows(dim, &rows).unwrap();
        let ix = build_ivf(&db, centroids, Codec::Pq(cb), true).unwrap();
        for (c, list) in ix.lists().iter().enumerate() {
            for (pos, &id) in list.ids.iter().enumerate() {
                assert_eq!(ix.reconstruct(c, pos).unwrap(), db.row(id as usize));
            }
        }
    }

    #[test]
    fn residual_helps_short_pq_codes_on_clustered_data() {
        // clustered data: 32 tight clusters with far-apart centers
        let centers = sample_gaussian(32, 16, 11).unwrap();
        let noise = sample_gaussian(6000, 16, 12).unwrap();
        let mut data = Vec::new();
        for (i, e) in noise.rows().enumerate() {
            let c = centers.row(i % 32);
            data.extend(c.iter().zip(e).map(|(c, e)| 4.0 * c + 0.5 * e));
        }
        let data = VectorDataset::new(16, data).unwrap();
        let train = data.slice_rows(0, 4000).unwrap();
        let db = data.slice_rows(4000, 6000).unwrap();
        let km = train_kmeans(&train, 32, 10, 1).unwrap();
        // residual codebook trained on residuals
        let assign = km.centroids.assign(&train);
        let mut res = Vec::new();
        for (i, &(c, _)) in assign.iter().enumerate() {
            res.extend(train.row(i).iter().zip(km.centroids.get(c as usize)).map(|(a, b)| a - b));
        }
        let res = VectorDataset::new(16, res).unwrap();
        let mse = |ix: &IvfIndex| {
            let mut total = 0.0;
            for (c, list) in ix.lists().iter().enumerate() {
                for (pos, &id) in list.ids.iter().enumerate() {
                    total += l2sq(db.row(id as usize), &ix.reconstruct(c, pos).unwrap());
                }
            }
            total / db.len() as f64
        };
        let plain = build_ivf(&db, km.centroids.clone(), Codec::Pq(train_pq(&train, 8, 8, 2).unwrap()), false).unwrap();
        let resid = build_ivf(&db, km.centroids.clone(), Codec::Pq(train_pq(&res, 8, 8, 2).unwrap()), true).unwrap();
        assert_eq!(plain.code_size(), 8);
        let (a, b) = (mse(&plain), mse(&resid));
        assert!(b <= a, "residual mse {b} vs plain {a}");
    }

    #[test]
    fn residual_requires_pq() {
        let db = sample_gaussian(100, 16, 1).unwrap();
        let km = train_kmeans(&db, 4, 3, 1).unwrap();
        assert!(build_ivf(&db, km.centroids.clone(), Codec::Flat, true).is_err());
        let itq = crate::index::itq::train_itq(&db, 8, 5, 1).unwrap().model;
        assert!(build_ivf(&db, km.centroids.clone(), Codec::Itq(itq), true).is_err());
    }

    #[test]
    fn nprobe_bounds() {
        let (_, ix) = small_index(Codec::Flat, false);
        assert!(ix.probe(0).is_err());
        assert!(ix.probe(ix.k() + 1).is_err());
        assert!(ix.probe(ix.k()).is_ok());
    }

    #[test]
    fn exact_assigner_returns_argmin() {
        let (_, ix) = small_index(Codec::Flat, false);
        let queries = sample_gaussian(30, 8, 6).unwrap();
        let probes = coarse_assign(&Assigner::Exact, ix.centroids(), &queries, 1).unwrap();
        for (q, p) in queries.rows().zip(&probes) {
            assert_eq!(p, &vec![ix.centroids().nearest(q).0]);
        }
    }

    #[test]
    fn full_rerank_equals_exact_assigner() {
        let db = sample_gaussian(2000, 16, 1).unwrap();
        let km = train_kmeans(&db, 64, 5, 1).unwrap();
        let queries = sample_gaussian(50, 16, 2).unwrap();
        let nprobe = 4;
        let approx = train_pq_assigner(&km.centroids, 4, 4, 64 / nprobe, 3).unwrap();
        assert_eq!(
            coarse_assign(&approx, &km.centroids, &queries, nprobe).unwrap(),
            coarse_assign(&Assigner::Exact, &km.centroids, &queries, nprobe).unwrap()
        );
        // oversized factor clamps silently
        let wide = train_pq_assigner(&km.centroids, 4, 4, 1000, 3).unwrap();
        assert!(coarse_assign(&wide, &km.centroids, &queries, nprobe).is_ok());
    }

    #[test]
    fn pq_prefilter_keeps_most_true_probes() {
        let data = sample_gaussian(20_000, 32, 21).unwrap();
        let km = train_kmeans(&data, 1024, 4, 22).unwrap();
        let queries = sample_gaussian(200, 32, 23).unwrap();
        let nprobe = 16;
        let approx = train_pq_assigner(&km.centroids, 16, 8, DEFAULT_RERANK_FACTOR, 24).unwrap();
        let a = coarse_assign(&approx, &km.centroids, &queries, nprobe).unwrap();
        let e = coarse_assign(&Assigner::Exact, &km.centroids, &queries, nprobe).unwrap();
        let hits: usize = a
            .iter()
            .zip(&e)
            .map(|(a, e)| a.iter().filter(|c| e.contains(c)).count())
            .sum();
        let recall = hits as f64 / (nprobe * queries.len()) as f64;
        assert!(recall >= 0.9, "recall {recall}");
    }

    #[test]
    fn index_with_pq_assigner_searches() {
        let (db, ix) = small_index(Codec::Flat, false);
        let assigner = train_pq_assigner(ix.centroids(), 2, 4, 2, 1).unwrap();
        let ix = ix.with_assigner(assigner).unwrap();
        let queries = sample_gaussian(10, 8, 9).unwrap();
        let got = knn_search(&ix.probe(ix.k()).unwrap(), &queries, 5).unwrap();
        assert_eq!(got, brute_force_knn(&queries, &db, 5).unwrap());
    }
}
