//! Exact solution counts for the Vinogradov system and its congruence-restricted variants.
//!
//! `J_{s,k}(X)` counts `2s`-tuples in `[1, ⌊X⌋]` with equal power sums of
//! degrees `1..=k` on the two sides. `I_m(X; ξ, η; a, b)` further forces the
//! first `m` variables of each side into the class `ξ mod p^a` and the rest
//! into `η mod p^b`. Both reduce to sums of squared signature multiplicities
//! of one side.

pub mod strategy;

use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::MultisetIter;
use crate::primes::is_prime;
use crate::signature::{check_packed_range, packed_term};
use strategy::{naive_count, squared_multiplicities, JCounter, NaiveCounter, PartitionedCounter};

/// Variables per side supported by the main pipeline.
pub const MAX_PAIRS: u32 = 6;
/// Largest `⌊X⌋` the packed layout supports with six variables per side.
pub const MAX_RANGE: u64 = 255;

/// Nonnegative rational range bound `X`.
pub type Bound = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountQuery {
    pub s: u32,
    pub k: u32,
    pub x: Bound,
}

impl CountQuery {
    pub fn new(s: u32, k: u32, x: Bound) -> Self {
        CountQuery { s, k, x }
    }

    pub fn integer(s: u32, k: u32, x: u64) -> Self {
        CountQuery { s, k, x: Bound::from_integer(x) }
    }

    /// The cubic, six-pair case used throughout the lemma pipeline.
    pub fn cubic(x: Bound) -> Self {
        CountQuery { s: 6, k: 3, x }
    }

    pub fn floor(&self) -> u64 {
        self.x.to_integer()
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s > MAX_PAIRS {
            return Err(Error::scale(format!("s = {} outside 1..={MAX_PAIRS}", self.s)));
        }
        if self.k == 0 || self.k > 3 {
            return Err(Error::scale(format!("k = {} outside 1..=3", self.k)));
        }
        if self.floor() > MAX_RANGE {
            return Err(Error::scale(format!("⌊X⌋ = {} exceeds {MAX_RANGE}", self.floor())));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<u64> {
        (1..=self.floor()).collect()
    }
}

impl fmt::Display for CountQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J_{{{},{}}}({})", self.s, self.k, self.x)
    }
}

/// Residue-class restriction for `I_m(X; ξ, η; a, b)`. Residues are taken in `(0, p^e]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceSpec {
    pub p: u64,
    pub a: u32,
    pub b: u32,
    pub xi: u64,
    pub eta: u64,
    pub m: u32,
}

impl CongruenceSpec {
    pub fn validate(&self, s: u32) -> Result<()> {
        check_prime(self.p)?;
        if self.a == 0 || self.b == 0 {
            return Err(Error::pre("exponents a, b must be positive"));
        }
        let pa = modulus(self.p, self.a)?;
        let pb = modulus(self.p, self.b)?;
        if self.xi == 0 || self.xi > pa {
            return Err(Error::pre(format!("ξ = {} not in (0, {pa}]", self.xi)));
        }
        if self.eta == 0 || self.eta > pb {
            return Err(Error::pre(format!("η = {} not in (0, {pb}]", self.eta)));
        }
        if self.m >= s {
            return Err(Error::pre(format!("m = {} must be below s = {s}", self.m)));
        }
        Ok(())
    }

    /// The same count with the two groups exchanged: `(η, ξ; b, a)` with `s - m`.
    pub fn mirrored(&self, s: u32) -> Self {
        CongruenceSpec { p: self.p, a: self.b, b: self.a, xi: self.eta, eta: self.xi, m: s - self.m }
    }
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::pre(format!("p = {p} must be a prime ≥ 5")));
    }
    Ok(())
}

/// `p^e`, or a scale error when it does not fit in 64 bits.
pub fn modulus(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| Error::scale(format!("{p}^{e} overflows 64 bits")))
}

/// Members of `residue mod modulus` in `[1, n]`.
pub fn residue_class(residue: u64, modulus: u64, n: u64) -> Vec<u64> {
    let start = match residue % modulus {
        0 => modulus,
        r => r,
    };
    (start..=n).step_by(modulus as usize).collect()
}

/// `J_{s,k}(X)` with the default engine.
pub fn count_j(q: &CountQuery) -> Result<u128> {
    count_j_with(q, &PartitionedCounter)
}

pub fn count_j_with(q: &CountQuery, engine: &dyn JCounter) -> Result<u128> {
    q.validate()?;
    engine.count(&q.values(), q.s, q.k)
}

/// Brute force over ordered `2s`-tuples; refuses more than 10^9 tuples.
pub fn count_j_naive(q: &CountQuery) -> Result<u128> {
    q.validate()?;
    NaiveCounter.count(&q.values(), q.s, q.k)
}

/// `I_m(X; ξ, η; a, b)`: convolves the `ξ`-group and `η`-group signature
/// tables, then sums squared combined multiplicities.
pub fn count_i_class(q: &CountQuery, c: &CongruenceSpec) -> Result<u128> {
    q.validate()?;
    c.validate(q.s)?;
    let n = q.floor();
    let xi_class = residue_class(c.xi, modulus(c.p, c.a)?, n);
    let eta_class = residue_class(c.eta, modulus(c.p, c.b)?, n);
    let m = c.m as usize;
    side_convolution(&xi_class, m, &eta_class, q.s as usize - m, q.k)
}

/// Class-restricted brute force over ordered `2s`-tuples.
pub fn count_i_class_naive(q: &CountQuery, c: &CongruenceSpec) -> Result<u128> {
    q.validate()?;
    c.validate(q.s)?;
    let n = q.floor();
    let xi_class = residue_class(c.xi, modulus(c.p, c.a)?, n);
    let eta_class = residue_class(c.eta, modulus(c.p, c.b)?, n);
    let (s, m) = (q.s as usize, c.m as usize);
    let side: Vec<&[u64]> = (0..s)
        .map(|i| if i < m { xi_class.as_slice() } else { eta_class.as_slice() })
        .collect();
    let classes: Vec<&[u64]> = side.iter().chain(side.iter()).copied().collect();
    naive_count(&classes, s, q.k)
}

fn multiset_count(n: usize, g: usize) -> u128 {
    // C(n + g - 1, g)
    if g == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    (0..g as u128).fold(1u128, |acc, i| acc * (n as u128 + i) / (i + 1))
}

fn side_convolution(first: &[u64], g1: usize, second: &[u64], g2: usize, k: u32) -> Result<u128> {
    if (g1 > 0 && first.is_empty()) || (g2 > 0 && second.is_empty()) {
        return Ok(0);
    }
    let max = first.iter().chain(second.iter()).copied().max().unwrap_or(1);
    check_packed_range(max, (g1 + g2) as u32, k)?;

    let (small, gs, large, gl) = if multiset_count(first.len(), g1) <= multiset_count(second.len(), g2) {
        (first, g1, second, g2)
    } else {
        (second, g2, first, g1)
    };
    let table: Vec<(u64, u64)> = MultisetIter::new(small, gs)?
        .map(|ms| (ms.values.iter().map(|&v| packed_term(v, k)).sum(), ms.weight))
        .collect();
    let mut combined = Vec::new();
    for ms in MultisetIter::new(large, gl)? {
        let key: u64 = ms.values.iter().map(|&v| packed_term(v, k)).sum();
        combined.extend(table.iter().map(|&(ks, ws)| (key + ks, ws * ms.weight)));
    }
    squared_multiplicities(combined)
}

/// Result of a max-form query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IMax {
    pub count: u128,
    pub xi: u64,
    pub eta: u64,
}

/// `I_m(X; a, b)`: maximum of the class count over `ξ mod p^a`, `η mod p^b`
/// with `ξ ≢ η (mod p)` for `m ≥ 1`, or over `η` alone for `m = 0`
/// (reported with `ξ = 1`). Ties go to the smallest `(ξ, η)`.
pub fn count_i_max(q: &CountQuery, p: u64, a: u32, b: u32, m: u32) -> Result<IMax> {
    count_i_max_by(q, p, a, b, m, |spec| count_i_class(q, spec))
}

/// Max-form search with a caller-supplied class counter (e.g. cache-backed).
pub fn count_i_max_by<F>(q: &CountQuery, p: u64, a: u32, b: u32, m: u32, class_count: F) -> Result<IMax>
where
    F: Fn(&CongruenceSpec) -> Result<u128> + Sync,
{
    q.validate()?;
    let probe = CongruenceSpec { p, a, b, xi: 1, eta: 1, m };
    probe.validate(q.s)?;
    let n = q.floor();
    let pa = modulus(p, a)?;
    let pb = modulus(p, b)?;

    // Residues above ⌊X⌋ have empty classes; every nonempty class has its
    // representative in [1, ⌊X⌋].
    let xis: Vec<u64> = if m == 0 { vec![1] } else { (1..=pa.min(n)).collect() };
    let etas: Vec<u64> = (1..=pb.min(n)).collect();
    let pairs: Vec<(u64, u64)> = xis
        .iter()
        .flat_map(|&xi| etas.iter().map(move |&eta| (xi, eta)))
        .filter(|&(xi, eta)| m == 0 || xi % p != eta % p)
        .collect();

    let counts: Vec<u128> = pairs
        .par_iter()
        .map(|&(xi, eta)| class_count(&CongruenceSpec { p, a, b, xi, eta, m }))
        .collect::<Result<_>>()?;

    let best = pairs
        .iter()
        .zip(&counts)
        .fold(None::<IMax>, |best, (&(xi, eta), &count)| match best {
            Some(b) if b.count >= count => Some(b),
            _ => Some(IMax { count, xi, eta }),
        });
    Ok(best.filter(|b| b.count > 0).unwrap_or_else(|| smallest_admissible_pair(p, pb, m)))
}

fn smallest_admissible_pair(p: u64, pb: u64, m: u32) -> IMax {
    let eta = if m == 0 { 1 } else { (1..=pb).find(|&e| e % p != 1).unwrap_or(2) };
    IMax { count: 0, xi: 1, eta }
}

/// Whether shifting the variable range to `[1 + shift, ⌊X⌋ + shift]` leaves `J` unchanged.
pub fn translate_check(q: &CountQuery, shift: u64) -> Result<bool> {
    q.validate()?;
    let n = q.floor();
    let top = n.checked_add(shift).filter(|&t| t <= MAX_RANGE).ok_or_else(|| {
        Error::scale(format!("translated range exceeds {MAX_RANGE}"))
    })?;
    let shifted: Vec<u64> = (1 + shift..=top).collect();
    let base = count_j(q)?;
    let moved = PartitionedCounter.count(&shifted, q.s, q.k)?;
    Ok(base == moved)
}

/// Effective growth exponent `ln J / ln ⌊X⌋`, fixed to 6 at `⌊X⌋ ≤ 1`.
/// For trend inspection only; never used in a verdict.
pub fn effective_exponent(j: u128, floor_x: u64) -> f64 {
    if floor_x <= 1 {
        return 6.0;
    }
    j.to_f64().unwrap_or(f64::INFINITY).ln() / (floor_x as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, a: u32, b: u32, xi: u64, eta: u64, m: u32) -> CongruenceSpec {
        CongruenceSpec { p, a, b, xi, eta, m }
    }

    #[test]
    fn j_examples() {
        assert_eq!(count_j(&CountQuery::integer(6, 3, 1)).unwrap(), 1);
        assert_eq!(count_j(&CountQuery::integer(2, 1, 2)).unwrap(), 6);
        assert_eq!(count_j(&CountQuery::integer(1, 3, 10)).unwrap(), 10);
        assert_eq!(count_j_naive(&CountQuery::integer(1, 1, 7)).unwrap(), 7);
    }

    #[test]
    fn j63_frozen_values() {
        // Independent brute force over ordered side tuples.
        let expected = [1u128, 924, 35169, 387136, 2241225, 8855436, 27235369, 72969024];
        for (i, &want) in expected.iter().enumerate() {
            let q = CountQuery::integer(6, 3, i as u64 + 1);
            assert_eq!(count_j(&q).unwrap(), want, "X = {}", i + 1);
        }
        assert_eq!(count_j_naive(&CountQuery::integer(6, 3, 5)).unwrap(), 2241225);
    }

    #[test]
    fn rational_bound_uses_floor() {
        let q = CountQuery::cubic(Bound::new(29, 5));
        assert_eq!(q.floor(), 5);
        assert_eq!(count_j(&q).unwrap(), 2241225);
        assert_eq!(count_j(&CountQuery::cubic(Bound::new(1, 2))).unwrap(), 0);
    }

    #[test]
    fn scale_limits() {
        assert!(matches!(count_j(&CountQuery::integer(7, 3, 2)), Err(Error::ScaleLimit(_))));
        assert!(matches!(count_j(&CountQuery::integer(6, 3, 256)), Err(Error::ScaleLimit(_))));
        assert!(matches!(count_j(&CountQuery::integer(2, 4, 3)), Err(Error::ScaleLimit(_))));
        assert!(matches!(count_j_naive(&CountQuery::integer(6, 3, 7)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn residue_classes() {
        assert_eq!(residue_class(2, 5, 17), vec![2, 7, 12, 17]);
        assert_eq!(residue_class(5, 5, 12), vec![5, 10]);
        assert_eq!(residue_class(27, 27, 20), Vec::<u64>::new());
    }

    #[test]
    fn class_count_frozen_example() {
        let q = CountQuery::integer(6, 3, 30);
        assert_eq!(count_i_class(&q, &spec(5, 1, 1, 1, 2, 2)).unwrap(), 1275780);
    }

    #[test]
    fn class_count_trivial_cases() {
        let q = CountQuery::integer(6, 3, 20);
        // ξ-class mod 125 with ξ > 20 is empty.
        assert_eq!(count_i_class(&q, &spec(5, 3, 1, 100, 1, 2)).unwrap(), 0);
        // η-class mod 25 containing exactly one integer ≤ 20.
        assert_eq!(count_i_class(&q, &spec(5, 1, 2, 1, 7, 0)).unwrap(), 1);
    }

    #[test]
    fn class_count_matches_naive() {
        let q = CountQuery::integer(6, 3, 12);
        for c in [spec(5, 1, 1, 1, 2, 1), spec(5, 1, 2, 3, 4, 4), spec(7, 1, 1, 2, 7, 3), spec(5, 2, 1, 6, 5, 0)] {
            assert_eq!(count_i_class(&q, &c).unwrap(), count_i_class_naive(&q, &c).unwrap(), "{c:?}");
        }
    }

    #[test]
    fn class_spec_validation() {
        let q = CountQuery::integer(6, 3, 10);
        assert!(count_i_class(&q, &spec(4, 1, 1, 1, 2, 1)).is_err());
        assert!(count_i_class(&q, &spec(3, 1, 1, 1, 2, 1)).is_err());
        assert!(count_i_class(&q, &spec(5, 1, 1, 0, 2, 1)).is_err());
        assert!(count_i_class(&q, &spec(5, 1, 1, 6, 2, 1)).is_err());
        assert!(count_i_class(&q, &spec(5, 1, 1, 1, 2, 6)).is_err());
        assert!(count_i_class(&q, &spec(5, 0, 1, 1, 2, 1)).is_err());
    }

    #[test]
    fn max_form_example_and_tie_break() {
        let q = CountQuery::integer(6, 3, 30);
        let best = count_i_max(&q, 5, 1, 1, 2).unwrap();
        assert_eq!(best, IMax { count: 1275780, xi: 1, eta: 2 });
    }

    #[test]
    fn max_form_m0_independent_of_a() {
        let q = CountQuery::integer(6, 3, 30);
        let base = count_i_max(&q, 5, 1, 1, 0).unwrap();
        for a in 2..=4 {
            assert_eq!(count_i_max(&q, 5, a, 1, 0).unwrap(), base);
        }
    }

    #[test]
    fn max_form_singleton_classes() {
        // p^b > 2X: every nonempty η-class is a singleton.
        let q = CountQuery::integer(6, 3, 20);
        assert_eq!(count_i_max(&q, 5, 1, 2, 0).unwrap().count, 1);
        // All classes empty at X < 1.
        let empty = CountQuery::cubic(Bound::new(1, 2));
        assert_eq!(count_i_max(&empty, 5, 1, 1, 2).unwrap(), IMax { count: 0, xi: 1, eta: 2 });
    }

    #[test]
    fn translation_invariance() {
        assert!(translate_check(&CountQuery::integer(2, 2, 5), 3).unwrap());
        assert!(translate_check(&CountQuery::integer(6, 3, 4), 1).unwrap());
        assert!(translate_check(&CountQuery::integer(3, 3, 6), 0).unwrap());
        assert!(translate_check(&CountQuery::integer(6, 3, 250), 10).is_err());
    }

    #[test]
    fn effective_exponent_convention() {
        assert_eq!(effective_exponent(1, 1), 6.0);
        assert!((effective_exponent(924, 2) - (924f64).log2()).abs() < 1e-12);
    }
}
