//! Interchangeable engines for the unrestricted count `J`.
//!
//! Every engine answers the same question: how many ordered `2s`-tuples
//! over a value set have equal power sums (degrees `1..=k`) on both sides.
//! Engines are registered by name and picked at runtime.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multiset::{for_each_with_sum, MultisetIter};
use crate::signature::{check_packed_range, packed_term};

pub const DEFAULT_STRATEGY: &str = "partitioned";

/// Direct enumeration is refused above this many ordered prefixes (all but the last coordinate).
pub const NAIVE_POINT_LIMIT: u128 = 1_000_000_000;

pub trait JCounter: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// `values` must be sorted ascending, distinct and positive.
    fn count(&self, values: &[u64], s: u32, k: u32) -> Result<u128>;
}

/// Brute force over ordered `2s`-tuples. Kept as the oracle for the other engines.
#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveCounter;

impl JCounter for NaiveCounter {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn description(&self) -> &'static str {
        "direct enumeration of ordered 2s-tuples (oracle, small scale only)"
    }

    fn count(&self, values: &[u64], s: u32, k: u32) -> Result<u128> {
        let classes: Vec<&[u64]> = vec![values; 2 * s as usize];
        naive_count(&classes, s as usize, k)
    }
}

/// Counts ordered tuples `(x_1..x_2s)` with `x_i` drawn from `classes[i]`
/// and matching power sums between positions `0..s` and `s..2s`.
pub(crate) fn naive_count(classes: &[&[u64]], s: usize, k: u32) -> Result<u128> {
    let Some((last, prefix)) = classes.split_last() else {
        return Ok(1);
    };
    // The last coordinate is solved for rather than looped over.
    let points = prefix
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if points > NAIVE_POINT_LIMIT {
        return Err(Error::Infeasible(format!(
            "{points} ordered prefixes exceed the direct-enumeration limit {NAIVE_POINT_LIMIT}"
        )));
    }
    let cube = |v: i64| [v, if k >= 2 { v * v } else { 0 }, if k >= 3 { v * v * v } else { 0 }];
    let powers: Vec<Vec<[i64; 3]>> =
        prefix.iter().map(|class| class.iter().map(|&v| cube(v as i64)).collect()).collect();
    let closing: HashSet<[i64; 3]> = last.iter().map(|&v| cube(v as i64)).collect();
    // With s = 0 the last position belongs to the left side.
    let last_sign = if prefix.len() < s { 1 } else { -1 };

    fn recurse(
        powers: &[Vec<[i64; 3]>],
        pos: usize,
        s: usize,
        acc: [i64; 3],
        closing: &HashSet<[i64; 3]>,
        last_sign: i64,
    ) -> u128 {
        if pos == powers.len() {
            let need = acc.map(|e| -last_sign * e);
            return u128::from(closing.contains(&need));
        }
        let sign = if pos < s { 1 } else { -1 };
        powers[pos]
            .iter()
            .map(|p| {
                let next = [acc[0] + sign * p[0], acc[1] + sign * p[1], acc[2] + sign * p[2]];
                recurse(powers, pos + 1, s, next, closing, last_sign)
            })
            .sum()
    }
    Ok(recurse(&powers, 0, s, [0; 3], &closing, last_sign))
}

/// One hash table of signature multiplicities over all size-`s` multisets.
#[derive(Clone, Copy, Debug, Default)]
pub struct SignatureTableCounter;

impl JCounter for SignatureTableCounter {
    fn name(&self) -> &'static str {
        "table"
    }

    fn description(&self) -> &'static str {
        "global signature multiplicity table, sum of squared multiplicities"
    }

    fn count(&self, values: &[u64], s: u32, k: u32) -> Result<u128> {
        let Some(&max) = values.last() else {
            return Ok(u128::from(s == 0));
        };
        check_packed_range(max, s, k)?;
        let partials: Vec<HashMap<u64, u64>> = MultisetIter::split_by_leading(values, s as usize)?
            .into_par_iter()
            .map(|part| {
                let mut table = HashMap::new();
                for ms in part {
                    let key: u64 = ms.values.iter().map(|&v| packed_term(v, k)).sum();
                    *table.entry(key).or_insert(0) += ms.weight;
                }
                table
            })
            .collect();
        let mut table: HashMap<u64, u64> = HashMap::new();
        for part in partials {
            for (key, w) in part {
                *table.entry(key).or_insert(0) += w;
            }
        }
        table
            .values()
            .try_fold(0u128, |acc, &w| acc.checked_add(u128::from(w) * u128::from(w)))
            .ok_or(Error::Overflow)
    }
}

/// Buckets multisets by their first power sum, then sorts and reduces each
/// bucket independently. Peak memory is one bucket per worker.
#[derive(Clone, Copy, Debug, Default)]
pub struct PartitionedCounter;

impl JCounter for PartitionedCounter {
    fn name(&self) -> &'static str {
        "partitioned"
    }

    fn description(&self) -> &'static str {
        "multisets bucketed by linear sum, per-bucket sort and reduce (parallel)"
    }

    fn count(&self, values: &[u64], s: u32, k: u32) -> Result<u128> {
        let (Some(&min), Some(&max)) = (values.first(), values.last()) else {
            return Ok(u128::from(s == 0));
        };
        check_packed_range(max, s, k)?;
        let g = s as usize;
        let terms: Vec<u64> = values.iter().map(|&v| packed_term(v, k)).collect();
        let lo = min * u64::from(s);
        let hi = max * u64::from(s);
        (lo..=hi)
            .into_par_iter()
            .map(|target| {
                let mut bucket: Vec<(u64, u64)> = Vec::new();
                for_each_with_sum(values, g, target, |idx, w| {
                    bucket.push((idx.iter().map(|&i| terms[i]).sum(), w));
                });
                squared_multiplicities(bucket)
            })
            .try_reduce(|| 0, |a, b| a.checked_add(b).ok_or(Error::Overflow))
    }
}

/// `Σ (Σ_{same key} w)²` over a list of weighted keys.
pub(crate) fn squared_multiplicities(mut entries: Vec<(u64, u64)>) -> Result<u128> {
    entries.sort_unstable_by_key(|e| e.0);
    let mut total = 0u128;
    let mut i = 0;
    while i < entries.len() {
        let key = entries[i].0;
        let mut run = 0u128;
        while i < entries.len() && entries[i].0 == key {
            run += u128::from(entries[i].1);
            i += 1;
        }
        total = run
            .checked_mul(run)
            .and_then(|sq| total.checked_add(sq))
            .ok_or(Error::Overflow)?;
    }
    Ok(total)
}

pub struct StrategyRegistry {
    entries: Vec<Box<dyn JCounter>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(PartitionedCounter));
        registry.register(Box::new(SignatureTableCounter));
        registry.register(Box::new(NaiveCounter));
        registry
    }

    /// Later registrations shadow earlier ones with the same name.
    pub fn register(&mut self, counter: Box<dyn JCounter>) {
        self.entries.retain(|c| c.name() != counter.name());
        self.entries.push(counter);
    }

    pub fn get(&self, name: &str) -> Result<&dyn JCounter> {
        self.entries
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn JCounter> {
        self.entries.iter().map(|c| c.as_ref())
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

/// Owned handle to a registered strategy.
pub fn strategy_by_name(name: &str) -> Result<Box<dyn JCounter>> {
    match name {
        "partitioned" => Ok(Box::new(PartitionedCounter)),
        "table" => Ok(Box::new(SignatureTableCounter)),
        "naive" => Ok(Box::new(NaiveCounter)),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}
