//! The auxiliary congruence count `N(p; a, c)`.
//!
//! With `S_j = y1^j + y2^j - y7^j - y8^j`, `N(p; a, c)` is the number of
//! `(y1, y2, y7, y8) mod p^c` satisfying
//!
//! ```text
//! 2ν·S1 + p^a·S2 ≡ 0   and   3ν·S2 + 2p^a·S3 ≡ 0   (mod p^c)
//! ```
//!
//! Both forms are sums of per-variable terms, so the count is the sum of
//! squared pair-class sizes over `(y1, y2)`. A plain quadruple loop is kept
//! alongside as an oracle.

use serde::{Deserialize, Serialize};

use crate::counting::check_prime;
use crate::error::{Error, Result};

/// Refuse enumerations over more than this many quadruples.
pub const FEASIBILITY_LIMIT: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SCongruenceParams {
    pub p: u64,
    pub nu: i64,
    pub a: u32,
    pub c: u32,
}

impl SCongruenceParams {
    pub fn new(p: u64, nu: i64, a: u32, c: u32) -> Self {
        SCongruenceParams { p, nu, a, c }
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        if self.a == 0 {
            return Err(Error::pre("a must be at least 1"));
        }
        if self.nu.rem_euclid(self.p as i64) == 0 {
            return Err(Error::pre(format!("ν = {} is divisible by p = {}", self.nu, self.p)));
        }
        feasible(self.p, self.c)?;
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.c)
    }

    /// Per-variable residues `(2νy + p^a y², 3νy² + 2p^a y³) mod p^c`.
    fn term(&self, y: u64, modulus: u64) -> (u64, u64) {
        let m = modulus as i128;
        let nu = (self.nu as i128).rem_euclid(m);
        let pa = pow_mod(self.p, self.a, modulus) as i128;
        let y = y as i128 % m;
        let y2 = y * y % m;
        let y3 = y2 * y % m;
        let t1 = (2 * nu * y + pa * y2).rem_euclid(m);
        let t2 = (3 * nu % m * y2 + 2 * pa * y3).rem_euclid(m);
        (t1 as u64, t2 as u64)
    }

    fn satisfies(&self, y: &[u64; 4], modulus: u64) -> bool {
        let t: Vec<(u64, u64)> = y.iter().map(|&v| self.term(v, modulus)).collect();
        let f1 = (t[0].0 + t[1].0 + 2 * modulus - t[2].0 - t[3].0) % modulus;
        let f2 = (t[0].1 + t[1].1 + 2 * modulus - t[2].1 - t[3].1) % modulus;
        f1 == 0 && f2 == 0
    }
}

fn pow_mod(base: u64, exp: u32, modulus: u64) -> u64 {
    let mut acc = 1u128 % modulus as u128;
    for _ in 0..exp {
        acc = acc * base as u128 % modulus as u128;
    }
    acc as u64
}

fn feasible(p: u64, c: u32) -> Result<()> {
    let points = (p as u128).checked_pow(4 * c).unwrap_or(u128::MAX);
    if points > FEASIBILITY_LIMIT {
        return Err(Error::Infeasible(format!("{p}^{} quadruples exceed {FEASIBILITY_LIMIT}", 4 * c)));
    }
    Ok(())
}

/// `S_j = y1^j + y2^j - y7^j - y8^j`, with the tuple ordered `(y1, y2, y7, y8)`.
pub fn power_sum_s(y: [i64; 4], j: u32) -> i128 {
    let pw = |v: i64| (v as i128).pow(j);
    pw(y[0]) + pw(y[1]) - pw(y[2]) - pw(y[3])
}

pub fn is_singular(y: &[u64; 4], p: u64) -> bool {
    y.iter().all(|&v| v % p == y[0] % p)
}

/// Pair-class sizes over `(y1, y2)`, optionally restricted to `y1 ≡ y2 ≡ β (mod p)`.
fn pair_classes(params: &SCongruenceParams, beta: Option<u64>) -> Vec<u64> {
    let m = params.modulus();
    let terms: Vec<(u64, u64)> = (0..m).map(|y| params.term(y, m)).collect();
    let mut classes = vec![0u64; (m * m) as usize];
    let admissible = |y: u64| beta.is_none_or(|b| y % params.p == b);
    for y1 in (0..m).filter(|&y| admissible(y)) {
        for y2 in (0..m).filter(|&y| admissible(y)) {
            let (a1, a2) = terms[y1 as usize];
            let (b1, b2) = terms[y2 as usize];
            let key = ((a1 + b1) % m) * m + (a2 + b2) % m;
            classes[key as usize] += 1;
        }
    }
    classes
}

fn squared_sum(classes: &[u64]) -> u128 {
    classes.iter().map(|&c| u128::from(c) * u128::from(c)).sum()
}

/// Exact `N(p; a, c)` for the given `ν`.
pub fn count_n(params: &SCongruenceParams) -> Result<u128> {
    params.validate()?;
    Ok(squared_sum(&pair_classes(params, None)))
}

/// Quadruple-loop oracle for [`count_n`].
pub fn count_n_naive(params: &SCongruenceParams) -> Result<u128> {
    Ok(solutions(params)?.len() as u128)
}

/// All solutions `(y1, y2, y7, y8)` with representatives in `[0, p^c)`.
pub fn solutions(params: &SCongruenceParams) -> Result<Vec<[u64; 4]>> {
    params.validate()?;
    let m = params.modulus();
    let mut out = Vec::new();
    for y1 in 0..m {
        for y2 in 0..m {
            for y7 in 0..m {
                for y8 in 0..m {
                    let y = [y1, y2, y7, y8];
                    if params.satisfies(&y, m) {
                        out.push(y);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `max_ν N(p; a, c)` over the units `ν ∈ [1, p)`.
pub fn count_n_max(p: u64, a: u32, c: u32) -> Result<u128> {
    let mut best = 0;
    for nu in 1..p as i64 {
        best = best.max(count_n(&SCongruenceParams::new(p, nu, a, c))?);
    }
    Ok(best)
}

/// The bound `(c + 1) p^{2c}`.
pub fn lemma8_bound(p: u64, c: u32) -> u128 {
    (c as u128 + 1) * (p as u128).pow(2 * c)
}

/// `(N_singular, N_nonsingular)`. At `c = 0` the lone empty solution is singular.
pub fn split_singular(params: &SCongruenceParams) -> Result<(u128, u128)> {
    let total = count_n(params)?;
    let singular: u128 = (0..params.p)
        .map(|beta| squared_sum(&pair_classes(params, Some(beta))))
        .sum();
    Ok((singular, total - singular))
}

/// Counts lifts of a nonsingular solution mod `p^c` that solve the system mod `p^{c+1}`.
pub fn verify_nonsingular_lift(params: &SCongruenceParams, y: [u64; 4]) -> Result<u64> {
    params.validate()?;
    feasible(params.p, params.c + 1)?;
    let m = params.modulus();
    if y.iter().any(|&v| v >= m) || !params.satisfies(&y, m) {
        return Err(Error::pre(format!("{y:?} is not a solution mod {m}")));
    }
    if is_singular(&y, params.p) {
        return Err(Error::pre(format!("{y:?} is singular")));
    }
    let next = m * params.p;
    let p = params.p;
    let mut lifts = 0;
    for t0 in 0..p {
        for t1 in 0..p {
            for t2 in 0..p {
                for t3 in 0..p {
                    let lifted = [y[0] + m * t0, y[1] + m * t1, y[2] + m * t2, y[3] + m * t3];
                    if params.satisfies(&lifted, next) {
                        lifts += 1;
                    }
                }
            }
        }
    }
    Ok(lifts)
}

/// Whether the gradients of the two forms at `y` are proportional mod `p`.
pub fn gradients_proportional_mod_p(params: &SCongruenceParams, y: [u64; 4]) -> bool {
    let p = params.p as i128;
    let nu = params.nu as i128;
    let pa = pow_mod(params.p, params.a, params.p) as i128;
    let signs = [1i128, 1, -1, -1];
    let grad1: Vec<i128> = (0..4)
        .map(|i| (signs[i] * (2 * nu + 2 * pa * y[i] as i128)).rem_euclid(p))
        .collect();
    let grad2: Vec<i128> = (0..4)
        .map(|i| {
            let v = y[i] as i128 % p;
            (signs[i] * (6 * nu * v + 6 * pa * v * v)).rem_euclid(p)
        })
        .collect();
    (0..4).all(|i| (i + 1..4).all(|j| (grad1[i] * grad2[j] - grad1[j] * grad2[i]).rem_euclid(p) == 0))
}

/// Checks the two substitution identities under `y_i = β + p·u_i`:
///
/// ```text
/// 2νS1 + p^a S2 = 2(ν + βp^a) p S1' + p^{a+2} S2'
/// 3νS2 + 2p^a S3 = 6β(ν + βp^a) p S1' + 3(ν + 2βp^a) p² S2' + 2p^{a+3} S3'
/// ```
pub fn verify_singular_reduction_identity(p: i64, nu: i64, beta: i64, a: u32, u: [i64; 4]) -> bool {
    let (p, nu, beta) = (p as i128, nu as i128, beta as i128);
    let pa = p.pow(a);
    let y = u.map(|ui| (beta + p * ui as i128) as i64);
    let s = |j| power_sum_s(y, j);
    let sp = |j| power_sum_s(u, j);

    let lhs1 = 2 * nu * s(1) + pa * s(2);
    let rhs1 = 2 * (nu + beta * pa) * p * sp(1) + pa * p * p * sp(2);
    let lhs2 = 3 * nu * s(2) + 2 * pa * s(3);
    let rhs2 = 6 * beta * (nu + beta * pa) * p * sp(1)
        + 3 * (nu + 2 * beta * pa) * p * p * sp(2)
        + 2 * pa * p.pow(3) * sp(3);
    lhs1 == rhs1 && lhs2 == rhs2
}

/// `N(p; a, c) ≤ 2p^{2c} + p^4 N(p; a+1, c-2)` with both sides maximized over `ν`.
pub fn verify_recursion_bound(p: u64, a: u32, c: u32) -> Result<bool> {
    let (lhs, rhs) = recursion_sides(p, a, c)?;
    Ok(lhs <= rhs)
}

/// `(N(p;a,c), 2p^{2c} + p^4 N(p;a+1,c-2))`.
pub fn recursion_sides(p: u64, a: u32, c: u32) -> Result<(u128, u128)> {
    if c < 2 {
        return Err(Error::pre("the recursion needs c ≥ 2"));
    }
    let lhs = count_n_max(p, a, c)?;
    let p = p as u128;
    let rhs = 2 * p.pow(2 * c) + p.pow(4) * count_n_max(p as u64, a + 1, c - 2)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_power_sums() {
        assert_eq!(power_sum_s([1, 1, 1, 1], 3), 0);
        assert_eq!(power_sum_s([2, 3, 1, 4], 1), 0);
        assert_eq!(power_sum_s([2, 3, 1, 4], 2), -4);
        assert_eq!(power_sum_s([5, -2, 5, -2], 3), 0);
    }

    #[test]
    fn frozen_counts() {
        // From an independent quadruple-loop enumeration.
        let cases = [
            ((5, 1, 1, 0), 1, 1),
            ((5, 1, 1, 1), 45, 5),
            ((5, 2, 1, 1), 45, 5),
            ((7, 1, 1, 1), 91, 7),
            ((5, 1, 1, 2), 1625, 625),
            ((5, 2, 1, 2), 1625, 625),
            ((5, 1, 2, 2), 1625, 625),
            ((5, 3, 2, 2), 1625, 625),
            ((7, 1, 1, 2), 6517, 2401),
        ];
        for ((p, nu, a, c), total, singular) in cases {
            let params = SCongruenceParams::new(p, nu, a, c);
            assert_eq!(count_n(&params).unwrap(), total, "{params:?}");
            assert_eq!(split_singular(&params).unwrap(), (singular, total - singular), "{params:?}");
        }
    }

    #[test]
    fn pair_split_matches_quadruple_loop() {
        for (p, a, c) in [(5, 1, 2), (5, 2, 2), (7, 1, 2), (5, 3, 1), (11, 1, 1)] {
            for nu in [1, 2, -3] {
                let params = SCongruenceParams::new(p, nu, a, c);
                assert_eq!(count_n(&params).unwrap(), count_n_naive(&params).unwrap(), "{params:?}");
            }
        }
    }

    #[test]
    fn nu_independent_over_units_mod_prime_power() {
        let base = count_n(&SCongruenceParams::new(5, 1, 1, 3)).unwrap();
        for nu in (1..125).filter(|n| n % 5 != 0) {
            assert_eq!(count_n(&SCongruenceParams::new(5, nu, 1, 3)).unwrap(), base);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(count_n(&SCongruenceParams::new(5, 10, 1, 1)).is_err());
        assert!(count_n(&SCongruenceParams::new(3, 1, 1, 1)).is_err());
        assert!(count_n(&SCongruenceParams::new(5, 1, 0, 1)).is_err());
        assert!(matches!(count_n(&SCongruenceParams::new(7, 1, 1, 3)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn empty_modulus_is_singular() {
        assert_eq!(split_singular(&SCongruenceParams::new(5, 1, 1, 0)).unwrap(), (1, 0));
        assert_eq!(count_n_max(5, 1, 0).unwrap(), 1);
    }

    #[test]
    fn lifts_at_c1() {
        let params = SCongruenceParams::new(5, 1, 1, 1);
        let sols = solutions(&params).unwrap();
        let mut nonsingular = 0;
        for y in sols {
            if is_singular(&y, 5) {
                assert!(verify_nonsingular_lift(&params, y).is_err());
                assert!(gradients_proportional_mod_p(&params, y));
            } else {
                nonsingular += 1;
                assert_eq!(verify_nonsingular_lift(&params, y).unwrap(), 25);
                assert!(!gradients_proportional_mod_p(&params, y));
            }
        }
        assert_eq!(nonsingular, 40);
        assert!(verify_nonsingular_lift(&params, [0, 1, 2, 2]).is_err());
    }

    #[test]
    fn reduction_identity_examples() {
        assert!(verify_singular_reduction_identity(5, 1, 0, 1, [1, 2, 3, 4]));
        assert!(verify_singular_reduction_identity(5, 3, 2, 2, [-7, 0, 9, 4]));
        assert!(verify_singular_reduction_identity(7, -2, 4, 3, [3, 3, 3, 3]));
    }

    #[test]
    fn recursion_bound_examples() {
        assert!(verify_recursion_bound(5, 1, 2).unwrap());
        assert!(verify_recursion_bound(5, 2, 2).unwrap());
        assert!(verify_recursion_bound(5, 1, 1).is_err());
    }
}
