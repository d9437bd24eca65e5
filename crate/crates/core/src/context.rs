//! Cache-through counting: every count the lemma suite needs goes through a
//! [`Counter`], which consults the persistent cache before computing.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cache::{CacheKey, CacheRecord, CacheStats, CountCache};
use crate::congruence::{self, SCongruenceParams};
use crate::counting::strategy::{strategy_by_name, JCounter, PartitionedCounter};
use crate::counting::{self, CongruenceSpec, CountQuery, IMax};
use crate::error::Result;

pub struct Counter {
    cache: Arc<CountCache>,
    engine: Box<dyn JCounter>,
    // Individual class counts are only memoized in memory; the persistent
    // cache would otherwise hold thousands of near-singleton classes per sweep.
    class_memo: Mutex<HashMap<(CountQuery, CongruenceSpec), u128>>,
}

impl Counter {
    pub fn new(cache: Arc<CountCache>, engine: Box<dyn JCounter>) -> Self {
        Counter { cache, engine, class_memo: Mutex::new(HashMap::new()) }
    }

    pub fn in_memory() -> Self {
        Counter::new(Arc::new(CountCache::in_memory()), Box::new(PartitionedCounter))
    }

    pub fn with_engine(cache: Arc<CountCache>, engine: &str) -> Result<Self> {
        Ok(Counter::new(cache, strategy_by_name(engine)?))
    }

    pub fn engine_name(&self) -> &'static str {
        self.engine.name()
    }

    pub fn cache(&self) -> &CountCache {
        &self.cache
    }

    pub fn stats(&self) -> CacheStats {
        self.cache.stats()
    }

    fn through<F>(&self, key: CacheKey, compute: F) -> Result<u128>
    where
        F: FnOnce() -> Result<u128>,
    {
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.count);
        }
        let count = compute()?;
        self.cache.insert(CacheRecord::new(key, count))?;
        Ok(count)
    }

    pub fn j(&self, q: &CountQuery) -> Result<u128> {
        q.validate()?;
        let canonical = CountQuery::integer(q.s, q.k, q.floor());
        self.through(CacheKey::j(&canonical), || counting::count_j_with(&canonical, self.engine.as_ref()))
    }

    fn canonical(q: &CountQuery) -> CountQuery {
        CountQuery::integer(q.s, q.k, q.floor())
    }

    /// Class count, memoized in memory only.
    pub fn i_class(&self, q: &CountQuery, c: &CongruenceSpec) -> Result<u128> {
        let key = (Self::canonical(q), *c);
        if let Some(&hit) = self.class_memo.lock().expect("memo poisoned").get(&key) {
            return Ok(hit);
        }
        let count = counting::count_i_class(&key.0, c)?;
        self.class_memo.lock().expect("memo poisoned").insert(key, count);
        Ok(count)
    }

    /// Class count written through to the persistent cache.
    pub fn i_class_persistent(&self, q: &CountQuery, c: &CongruenceSpec) -> Result<u128> {
        let canonical = Self::canonical(q);
        self.through(CacheKey::i_class(&canonical, c), || self.i_class(&canonical, c))
    }

    pub fn i_max(&self, q: &CountQuery, p: u64, a: u32, b: u32, m: u32) -> Result<IMax> {
        q.validate()?;
        let canonical = Self::canonical(q);
        let key = CacheKey::i_max(&canonical, p, a, b, m);
        if let Some(hit) = self.cache.get(&key) {
            if let Some((xi, eta)) = hit.argmax {
                return Ok(IMax { count: hit.count, xi, eta });
            }
        }
        let best = counting::count_i_max_by(&canonical, p, a, b, m, |spec| self.i_class(&canonical, spec))?;
        let mut record = CacheRecord::new(key, best.count);
        record.argmax = Some((best.xi, best.eta));
        self.cache.insert(record)?;
        Ok(best)
    }

    pub fn n(&self, params: &SCongruenceParams) -> Result<u128> {
        self.through(CacheKey::n(params), || congruence::count_n(params))
    }

    pub fn n_max(&self, p: u64, a: u32, c: u32) -> Result<u128> {
        self.through(CacheKey::n_max(p, a, c), || congruence::count_n_max(p, a, c))
    }
}
