use std::sync::Arc;

use vinogradov::cache::CountCache;
use vinogradov::context::Counter;
use vinogradov::counting::strategy::StrategyRegistry;
use vinogradov::counting::{count_i_max, count_j, count_j_with, CongruenceSpec, CountQuery};
use vinogradov::lemmas::{run_sweep, LemmaRegistry, SweepConfig, SweepOutcome};

#[test]
fn engines_agree() {
    let registry = StrategyRegistry::with_defaults();
    assert_eq!(registry.names(), vec!["partitioned", "table", "naive"]);
    for (s, k, x) in [(1, 1, 9), (2, 3, 7), (3, 2, 6), (4, 3, 4), (6, 3, 3)] {
        let q = CountQuery::integer(s, k, x);
        let counts: Vec<u128> = registry.iter().map(|e| count_j_with(&q, e).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "s={s} k={k} X={x}: {counts:?}");
    }
}

#[test]
fn j_is_monotone_in_x() {
    let mut prev = 0;
    for x in 1..=14 {
        let j = count_j(&CountQuery::integer(6, 3, x)).unwrap();
        assert!(j > prev);
        prev = j;
    }
}

#[test]
fn max_form_dominates_each_class() {
    let q = CountQuery::integer(6, 3, 26);
    let best = count_i_max(&q, 5, 1, 1, 3).unwrap();
    for xi in 1..=5 {
        for eta in (1..=5).filter(|e| e % 5 != xi % 5) {
            let spec = CongruenceSpec { p: 5, a: 1, b: 1, xi, eta, m: 3 };
            assert!(vinogradov::counting::count_i_class(&q, &spec).unwrap() <= best.count);
        }
    }
}

#[test]
fn persisted_cache_serves_second_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.jsonl");
    let cfg = SweepConfig { lemmas: vec![1, 3], primes: vec![5], ..SweepConfig::default() };
    let registry = LemmaRegistry::with_defaults();

    let first = {
        let counter = Counter::with_engine(Arc::new(CountCache::open(&path).unwrap()), "partitioned").unwrap();
        run_sweep(&counter, &registry, &cfg).unwrap()
    };
    let counter = Counter::with_engine(Arc::new(CountCache::open(&path).unwrap()), "table").unwrap();
    assert!(counter.stats().loaded > 0);
    let second = run_sweep(&counter, &registry, &cfg).unwrap();
    assert_eq!(first, second);
    assert_eq!(counter.stats().misses, 0);
    assert!(second.iter().all(|o| !matches!(o, SweepOutcome::Errored { .. })));
}

#[test]
fn cache_file_is_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.jsonl");
    let _held = CountCache::open(&path).unwrap();
    assert!(CountCache::open(&path).is_err());
}
