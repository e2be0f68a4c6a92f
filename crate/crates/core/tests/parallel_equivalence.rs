//! The rayon path and the sequential fallback produce identical results.

use rsbench::distributions::sample_gaussian;
use rsbench::index::ivf::{build_ivf, train_pq_assigner, Codec};
use rsbench::index::{train_itq, train_kmeans, train_pq};
use rsbench::isotonic::collect_training_pairs;
use rsbench::par;
use rsbench::rsm::{budget_shortlists, BudgetMode};
use rsbench::search::{global_top, knn_search, range_search};
use rsbench::{fit_isotonic, generate, ExactIndex, OracleSetting, SynthConfig};

fn both<T: PartialEq + std::fmt::Debug>(f: impl Fn() -> T) {
    par::set_sequential(true);
    let seq = f();
    par::set_sequential(false);
    let par = f();
    assert_eq!(seq, par);
}

#[test]
fn sequential_fallback_matches_parallel() {
    let db = sample_gaussian(3000, 16, 1).unwrap();
    let queries = sample_gaussian(150, 16, 2).unwrap();
    let exact = ExactIndex::new(&db);

    both(|| knn_search(&exact, &queries, 7).unwrap());
    both(|| range_search(&exact, &queries, 12.0).unwrap());
    both(|| global_top(&exact, &queries, 500).unwrap());
    both(|| budget_shortlists(&exact, &queries, &[0, 100, 1000], BudgetMode::Range).unwrap());

    both(|| train_kmeans(&db, 32, 5, 3).unwrap().centroids);
    let km = train_kmeans(&db, 32, 5, 3).unwrap();
    both(|| train_pq(&db, 4, 8, 4).unwrap());
    both(|| train_itq(&db, 16, 10, 5).unwrap().model);

    let pq = train_pq(&db, 4, 8, 4).unwrap();
    let assigner = train_pq_assigner(&km.centroids, 4, 4, 2, 6).unwrap();
    both(|| {
        let ix = build_ivf(&db, km.centroids.clone(), Codec::Pq(pq.clone()), true)
            .unwrap()
            .with_assigner(assigner.clone())
            .unwrap();
        let probe = ix.probe(4).unwrap();
        (ix.lists().to_vec(), knn_search(&probe, &queries, 5).unwrap(), global_top(&probe, &queries, 300).unwrap())
    });
}

#[test]
fn generation_and_fit_do_not_depend_on_threads() {
    let cfg = SynthConfig {
        dim: 16,
        n_items: 2000,
        n_queries: 200,
        n_train: 4000,
        n_groups: 30,
        tau_strict: 1.9,
        tau_relaxed: 2.2,
        singleton_fraction: 0.9,
        ..SynthConfig::desk_default()
    };
    both(|| {
        let ds = generate(&cfg).unwrap();
        (ds.queries.clone(), ds.db.clone(), ds.positive_pairs(OracleSetting::Strict))
    });
    let ds = generate(&cfg).unwrap();
    let tq = ds.train.slice_rows(0, 500).unwrap();
    let tdb = ds.train.slice_rows(500, ds.train.len()).unwrap();
    let o = &ds.oracle;
    both(|| {
        let pairs = collect_training_pairs(
            &tq,
            &tdb,
            |a, b| o.label_items(o.train_item(a), o.train_item(b + 500), OracleSetting::Relaxed),
            1.0,
            1000,
            7,
        )
        .unwrap();
        fit_isotonic(&pairs).unwrap()
    });
}
