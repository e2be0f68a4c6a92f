//! Parallel vs sequential execution of the hot paths: exact k-NN, the global
//! range-budget selection, IVF probing and k-means assignment.
//!
//! Each benchmark runs twice, once on the rayon pool and once with the
//! runtime sequential switch. Without the `parallel` feature both variants
//! take the sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rsbench::distributions::sample_gaussian;
use rsbench::index::ivf::{build_ivf, Codec};
use rsbench::index::{train_kmeans, train_pq};
use rsbench::par;
use rsbench::search::{global_top, knn_search};
use rsbench::ExactIndex;

const DIM: usize = 64;

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("sequential", true)]
}

fn exact_search(c: &mut Criterion) {
    let db = sample_gaussian(20_000, DIM, 1).unwrap();
    let queries = sample_gaussian(256, DIM, 2).unwrap();
    let index = ExactIndex::new(&db);
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    for (name, sequential) in modes() {
        par::set_sequential(sequential);
        group.bench_function(BenchmarkId::new("knn10", name), |b| {
            b.iter(|| knn_search(black_box(&index), black_box(&queries), 10).unwrap())
        });
        group.bench_function(BenchmarkId::new("global_top_5000", name), |b| {
            b.iter(|| global_top(black_box(&index), black_box(&queries), 5000).unwrap())
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn ivf_probe(c: &mut Criterion) {
    let db = sample_gaussian(50_000, DIM, 3).unwrap();
    let queries = sample_gaussian(512, DIM, 4).unwrap();
    let km = train_kmeans(&db.slice_rows(0, 10_000).unwrap(), 256, 4, 5).unwrap();
    let pq = train_pq(&db.slice_rows(0, 10_000).unwrap(), 8, 8, 6).unwrap();
    let flat = build_ivf(&db, km.centroids.clone(), Codec::Flat, false).unwrap();
    let coded = build_ivf(&db, km.centroids, Codec::Pq(pq), true).unwrap();
    let mut group = c.benchmark_group("ivf");
    group.sample_size(10);
    for (name, sequential) in modes() {
        par::set_sequential(sequential);
        let probe = flat.probe(16).unwrap();
        group.bench_function(BenchmarkId::new("flat_nprobe16_knn10", name), |b| {
            b.iter(|| knn_search(black_box(&probe), black_box(&queries), 10).unwrap())
        });
        let probe = coded.probe(16).unwrap();
        group.bench_function(BenchmarkId::new("pq8x8_residual_nprobe16_knn10", name), |b| {
            b.iter(|| knn_search(black_box(&probe), black_box(&queries), 10).unwrap())
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn kmeans_assign(c: &mut Criterion) {
    let data = sample_gaussian(20_000, DIM, 7).unwrap();
    let km = train_kmeans(&data.slice_rows(0, 4_000).unwrap(), 256, 2, 8).unwrap();
    let mut group = c.benchmark_group("kmeans");
    group.sample_size(10);
    for (name, sequential) in modes() {
        par::set_sequential(sequential);
        group.bench_function(BenchmarkId::new("assign_20k_to_256", name), |b| {
            b.iter(|| km.centroids.assign(black_box(&data)))
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, exact_search, ivf_probe, kmeans_assign);
criterion_main!(benches);
