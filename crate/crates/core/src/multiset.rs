//! Multiset enumeration with ordered-tuple weights.
//!
//! Ordered `g`-tuples are never materialized; each multiset stands in for
//! `g! / ∏ mult!` tuples.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest group size whose factorial fits in a `u64`.
pub const MAX_GROUP: usize = 20;

const FACTORIALS: [u64; MAX_GROUP + 1] = {
    let mut table = [1u64; MAX_GROUP + 1];
    let mut i = 1;
    while i <= MAX_GROUP {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

pub fn factorial(n: usize) -> u64 {
    FACTORIALS[n]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedMultiset {
    /// Nondecreasing.
    pub values: Vec<u64>,
    /// Number of ordered tuples realizing the multiset.
    pub weight: u64,
}

/// Weight of a nondecreasing index sequence.
pub(crate) fn ordered_weight(sorted_idx: &[usize]) -> u64 {
    let mut denom = 1u64;
    let mut run = 0usize;
    for i in 0..sorted_idx.len() {
        if i > 0 && sorted_idx[i] == sorted_idx[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        denom *= run as u64;
    }
    factorial(sorted_idx.len()) / denom
}

fn normalized(value_set: &[u64], g: usize) -> Result<Vec<u64>> {
    if g > MAX_GROUP {
        return Err(Error::scale(format!("group size {g} exceeds {MAX_GROUP}")));
    }
    let mut values = value_set.to_vec();
    values.sort_unstable();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::pre("value set contains duplicates"));
    }
    Ok(values)
}

/// Lexicographic stream of all size-`g` multisets over a value set.
#[derive(Clone, Debug)]
pub struct MultisetIter {
    values: Vec<u64>,
    idx: Vec<usize>,
    lead_end: usize,
    done: bool,
}

impl MultisetIter {
    pub fn new(value_set: &[u64], g: usize) -> Result<Self> {
        let values = normalized(value_set, g)?;
        let done = g > 0 && values.is_empty();
        let lead_end = values.len();
        Ok(MultisetIter { values, idx: vec![0; g], lead_end, done })
    }

    /// Splits the stream by leading element. Concatenating the parts in
    /// order reproduces the full stream.
    pub fn split_by_leading(value_set: &[u64], g: usize) -> Result<Vec<MultisetIter>> {
        let values = normalized(value_set, g)?;
        if g == 0 {
            return Ok(vec![MultisetIter { values, idx: Vec::new(), lead_end: 0, done: false }]);
        }
        Ok((0..values.len())
            .map(|lead| MultisetIter {
                values: values.clone(),
                idx: vec![lead; g],
                lead_end: lead + 1,
                done: false,
            })
            .collect())
    }

    fn advance(&mut self) {
        let n = self.values.len();
        for pos in (0..self.idx.len()).rev() {
            let limit = if pos == 0 { self.lead_end } else { n };
            if self.idx[pos] + 1 < limit {
                let next = self.idx[pos] + 1;
                for slot in &mut self.idx[pos..] {
                    *slot = next;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for MultisetIter {
    type Item = WeightedMultiset;

    fn next(&mut self) -> Option<WeightedMultiset> {
        if self.done {
            return None;
        }
        let item = WeightedMultiset {
            values: self.idx.iter().map(|&i| self.values[i]).collect(),
            weight: ordered_weight(&self.idx),
        };
        self.advance();
        Some(item)
    }
}

/// Lexicographic enumeration of all size-`g` multisets.
pub fn enumerate_weighted_multisets(value_set: &[u64], g: usize) -> Result<MultisetIter> {
    MultisetIter::new(value_set, g)
}

/// Visits every size-`g` multiset of `values` (sorted ascending, distinct)
/// whose element sum equals `target`, passing the nondecreasing index
/// sequence and its ordered weight.
pub(crate) fn for_each_with_sum<F>(values: &[u64], g: usize, target: u64, mut visit: F)
where
    F: FnMut(&[usize], u64),
{
    fn recurse<F: FnMut(&[usize], u64)>(
        values: &[u64],
        idx: &mut Vec<usize>,
        g: usize,
        start: usize,
        remaining: u64,
        visit: &mut F,
    ) {
        let slots = (g - idx.len()) as u64;
        if slots == 0 {
            if remaining == 0 {
                visit(idx, ordered_weight(idx));
            }
            return;
        }
        let max = *values.last().unwrap();
        if remaining > slots * max {
            return;
        }
        for i in start..values.len() {
            let v = values[i];
            if slots * v > remaining {
                break;
            }
            idx.push(i);
            recurse(values, idx, g, i, remaining - v, visit);
            idx.pop();
        }
    }
    if g == 0 {
        if target == 0 {
            visit(&[], 1);
        }
        return;
    }
    if values.is_empty() {
        return;
    }
    let mut idx = Vec::with_capacity(g);
    recurse(values, &mut idx, g, 0, target, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn two_from_two() {
        let got: Vec<_> = enumerate_weighted_multisets(&[1, 2], 2).unwrap().collect();
        assert_eq!(
            got,
            vec![
                WeightedMultiset { values: vec![1, 1], weight: 1 },
                WeightedMultiset { values: vec![1, 2], weight: 2 },
                WeightedMultiset { values: vec![2, 2], weight: 1 },
            ]
        );
    }

    #[test]
    fn empty_group_is_single_empty_multiset() {
        let got: Vec<_> = enumerate_weighted_multisets(&[3, 4, 5], 0).unwrap().collect();
        assert_eq!(got, vec![WeightedMultiset { values: vec![], weight: 1 }]);
        let got: Vec<_> = enumerate_weighted_multisets(&[], 0).unwrap().collect();
        assert_eq!(got.len(), 1);
        assert_eq!(enumerate_weighted_multisets(&[], 2).unwrap().count(), 0);
    }

    #[test]
    fn ten_choose_six_with_repetition() {
        let values: Vec<u64> = (1..=10).collect();
        let (count, total) = enumerate_weighted_multisets(&values, 6)
            .unwrap()
            .fold((0u64, 0u64), |(c, t), m| (c + 1, t + m.weight));
        assert_eq!(count, 5005);
        assert_eq!(total, 1_000_000);
    }

    #[test]
    fn weight_sum_identity_over_small_grid() {
        for n in 1..=12u64 {
            for g in 0..=8u64 {
                if binomial(n + g - 1, g) > 1_000_000 {
                    continue;
                }
                let values: Vec<u64> = (1..=n).collect();
                let (count, total) = enumerate_weighted_multisets(&values, g as usize)
                    .unwrap()
                    .fold((0u64, 0u64), |(c, t), m| {
                        assert_eq!(factorial(g as usize) % m.weight, 0);
                        (c + 1, t + m.weight)
                    });
                assert_eq!(count, binomial(n + g - 1, g), "n={n} g={g}");
                assert_eq!(total, n.pow(g as u32), "n={n} g={g}");
            }
        }
    }

    #[test]
    fn lexicographic_and_split_concatenates() {
        let values = [7u64, 3, 5, 11];
        let full: Vec<_> = enumerate_weighted_multisets(&values, 3).unwrap().collect();
        assert!(full.windows(2).all(|w| w[0].values < w[1].values));
        let parts: Vec<_> = MultisetIter::split_by_leading(&values, 3)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        assert_eq!(parts, full);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(enumerate_weighted_multisets(&[1, 2, 2], 2).is_err());
    }

    #[test]
    fn sum_constrained_matches_filter() {
        let values: Vec<u64> = (1..=9).collect();
        for target in 0..=40 {
            let mut seen = Vec::new();
            for_each_with_sum(&values, 4, target, |idx, w| {
                seen.push((idx.iter().map(|&i| values[i]).collect::<Vec<_>>(), w));
            });
            let expected: Vec<_> = enumerate_weighted_multisets(&values, 4)
                .unwrap()
                .filter(|m| m.values.iter().sum::<u64>() == target)
                .map(|m| (m.values, m.weight))
                .collect();
            assert_eq!(seen, expected, "target {target}");
        }
    }
}
