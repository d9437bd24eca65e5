//! Persistent count cache: one JSON object per line, keys sorted, counts as
//! decimal strings.
//!
//! ```text
//! {"a":1,"b":1,"count":"1275780","engine_version":"0.1.0","k":3,"kind":"I","m":2,"p":5,"s":6,"x_den":1,"x_num":30,"xi":1,"eta":2}
//! ```
//!
//! Every field other than `kind`, `count`, `engine_version` and the
//! `argmax_*` annotations is part of the canonical key. The file is held
//! under an exclusive advisory lock while open.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::congruence::SCongruenceParams;
use crate::counting::{CongruenceSpec, CountQuery};
use crate::error::{Error, Result};
use crate::ENGINE_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CountKind {
    J,
    I,
    N,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountKind::J => "J",
            CountKind::I => "I",
            CountKind::N => "N",
        })
    }
}

const RESERVED: [&str; 5] = ["kind", "count", "engine_version", "argmax_xi", "argmax_eta"];

/// Canonical identity of a cached count. `X` is canonicalized to `⌊X⌋`
/// since every count depends on the range only through its floor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub kind: CountKind,
    pub params: BTreeMap<String, i64>,
}

impl CacheKey {
    fn new(kind: CountKind, params: &[(&str, i64)]) -> Self {
        CacheKey { kind, params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }

    fn query_params(q: &CountQuery) -> Vec<(&'static str, i64)> {
        vec![("s", q.s as i64), ("k", q.k as i64), ("x_num", q.floor() as i64), ("x_den", 1)]
    }

    pub fn j(q: &CountQuery) -> Self {
        Self::new(CountKind::J, &Self::query_params(q))
    }

    pub fn i_class(q: &CountQuery, c: &CongruenceSpec) -> Self {
        let mut params = Self::query_params(q);
        params.extend([
            ("p", c.p as i64),
            ("a", c.a as i64),
            ("b", c.b as i64),
            ("xi", c.xi as i64),
            ("eta", c.eta as i64),
            ("m", c.m as i64),
        ]);
        Self::new(CountKind::I, &params)
    }

    pub fn i_max(q: &CountQuery, p: u64, a: u32, b: u32, m: u32) -> Self {
        let mut params = Self::query_params(q);
        params.extend([("p", p as i64), ("a", a as i64), ("b", b as i64), ("m", m as i64), ("max", 1)]);
        Self::new(CountKind::I, &params)
    }

    pub fn n(params: &SCongruenceParams) -> Self {
        Self::new(
            CountKind::N,
            &[("p", params.p as i64), ("nu", params.nu), ("a", params.a as i64), ("c", params.c as i64)],
        )
    }

    pub fn n_max(p: u64, a: u32, c: u32) -> Self {
        Self::new(CountKind::N, &[("p", p as i64), ("a", a as i64), ("c", c as i64), ("max", 1)])
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub count: u128,
    pub engine_version: String,
    /// Maximizing `(ξ, η)` for max-form `I` records.
    pub argmax: Option<(u64, u64)>,
}

impl CacheRecord {
    pub fn new(key: CacheKey, count: u128) -> Self {
        CacheRecord { key, count, engine_version: ENGINE_VERSION.to_string(), argmax: None }
    }

    pub fn to_json_line(&self) -> String {
        let mut obj: BTreeMap<String, Value> = BTreeMap::new();
        obj.insert("kind".into(), Value::String(self.key.kind.to_string()));
        for (k, v) in &self.key.params {
            obj.insert(k.clone(), Value::from(*v));
        }
        obj.insert("count".into(), Value::String(self.count.to_string()));
        obj.insert("engine_version".into(), Value::String(self.engine_version.clone()));
        if let Some((xi, eta)) = self.argmax {
            obj.insert("argmax_xi".into(), Value::from(xi));
            obj.insert("argmax_eta".into(), Value::from(eta));
        }
        serde_json::to_string(&obj).expect("cache record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let bad = |what: &str| Error::Cache(format!("{what} in cache line `{line}`"));
        let obj: Map<String, Value> = serde_json::from_str(line).map_err(|e| bad(&e.to_string()))?;
        let kind = match obj.get("kind").and_then(Value::as_str) {
            Some("J") => CountKind::J,
            Some("I") => CountKind::I,
            Some("N") => CountKind::N,
            _ => return Err(bad("missing or unknown kind")),
        };
        let count = obj
            .get("count")
            .and_then(Value::as_str)
            .and_then(|c| c.parse::<u128>().ok())
            .ok_or_else(|| bad("count is not a decimal string"))?;
        let engine_version = obj
            .get("engine_version")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing engine_version"))?
            .to_string();
        let argmax = match (obj.get("argmax_xi"), obj.get("argmax_eta")) {
            (Some(x), Some(e)) => Some((
                x.as_u64().ok_or_else(|| bad("argmax_xi"))?,
                e.as_u64().ok_or_else(|| bad("argmax_eta"))?,
            )),
            _ => None,
        };
        let mut params = BTreeMap::new();
        for (k, v) in &obj {
            if RESERVED.contains(&k.as_str()) {
                continue;
            }
            params.insert(k.clone(), v.as_i64().ok_or_else(|| bad(&format!("parameter {k}")))?);
        }
        Ok(CacheRecord { key: CacheKey { kind, params }, count, engine_version, argmax })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub loaded: u64,
}

pub struct CountCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<CacheKey, CacheRecord>>,
    writer: Mutex<Option<File>>,
    hits: AtomicU64,
    misses: AtomicU64,
    loaded: u64,
}

impl CountCache {
    pub fn in_memory() -> Self {
        CountCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            loaded: 0,
        }
    }

    /// Opens (creating if needed) and locks a cache file. Records written by
    /// other engine versions are ignored.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).read(true).append(true).open(&path)?;
        file.try_lock().map_err(|e| {
            Error::Cache(format!("cannot lock {}: {e}", path.display()))
        })?;
        let mut entries = HashMap::new();
        let mut loaded = 0;
        for (lineno, line) in BufReader::new(file.try_clone()?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record = CacheRecord::from_json_line(&line)
                .map_err(|e| Error::Cache(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
            if record.engine_version != ENGINE_VERSION {
                continue;
            }
            if let Some(prev) = entries.get(&record.key) {
                let prev: &CacheRecord = prev;
                if prev.count != record.count {
                    return Err(Error::Cache(format!("conflicting counts for {}", record.key)));
                }
                continue;
            }
            loaded += 1;
            entries.insert(record.key.clone(), record);
        }
        Ok(CountCache {
            path: Some(path),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(file)),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            loaded,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheRecord> {
        let found = self.entries.read().expect("cache lock poisoned").get(key).cloned();
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    /// Inserting an identical record twice is a no-op; a different count for
    /// an existing key is an error.
    pub fn insert(&self, record: CacheRecord) -> Result<()> {
        let mut entries = self.entries.write().expect("cache lock poisoned");
        if let Some(prev) = entries.get(&record.key) {
            if prev.count != record.count {
                return Err(Error::Cache(format!(
                    "refusing to overwrite {} = {} with {}",
                    record.key, prev.count, record.count
                )));
            }
            return Ok(());
        }
        if let Some(file) = self.writer.lock().expect("cache writer poisoned").as_mut() {
            writeln!(file, "{}", record.to_json_line())?;
            file.flush()?;
        }
        entries.insert(record.key.clone(), record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            loaded: self.loaded,
        }
    }
}
