use greedylab_core::bases::BasisRep;
use greedylab_core::dkk::DkkSpace;
use greedylab_core::params::{self, ConditionalityKind, SearchMode};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sampled_reports_do_not_depend_on_thread_count() {
    let dkk = BasisRep::dkk(DkkSpace::default_instance(4).unwrap());
    let run = || {
        let qg = params::quasi_greedy_constant(&dkk, 500, 42).unwrap();
        let kt = params::conditionality(&dkk, 4, ConditionalityKind::KTilde, &SearchMode::sampled(300, 42)).unwrap();
        (serde_json::to_string(&qg).unwrap(), serde_json::to_string(&kt).unwrap())
    };
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(one, four);
}

#[test]
fn exhaustive_ties_resolve_to_the_same_witness() {
    let b = BasisRep::difference(0.5, 6).unwrap();
    let mode = SearchMode::exhaustive().with_grid_levels(2);
    let run = || serde_json::to_string(&params::democracy_functions(&b, 4, &mode).unwrap()).unwrap();
    assert_eq!(in_pool(1, run), in_pool(3, run));
}

#[test]
fn different_seeds_differ() {
    let d = BasisRep::difference(0.5, 10).unwrap();
    let a = params::quasi_greedy_constant(&d, 50, 1).unwrap();
    let b = params::quasi_greedy_constant(&d, 50, 2).unwrap();
    assert_ne!(a.entries, b.entries);
}
