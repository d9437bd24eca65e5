//! Exact algebra of the exponent recursion.
//!
//! A bound `I_2(X; a, b) ≪ X^{θ+ε} p^{αa + βb}` is fed back through the
//! recursive estimate and comes out with new exponents `(α', β') = c + M(α, β)`.
//! Everything here is exact rational arithmetic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes::primes_in;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn ser_q<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentPair {
    #[serde(serialize_with = "ser_q")]
    pub alpha: Q,
    #[serde(serialize_with = "ser_q")]
    pub beta: Q,
}

impl ExponentPair {
    pub fn new(alpha: Q, beta: Q) -> Self {
        ExponentPair { alpha, beta }
    }

    pub fn zero() -> Self {
        ExponentPair::new(Q::zero(), Q::zero())
    }

    pub fn add(&self, other: &ExponentPair) -> ExponentPair {
        ExponentPair::new(&self.alpha + &other.alpha, &self.beta + &other.beta)
    }

    pub fn sub(&self, other: &ExponentPair) -> ExponentPair {
        ExponentPair::new(&self.alpha - &other.alpha, &self.beta - &other.beta)
    }

    pub fn scale(&self, k: &Q) -> ExponentPair {
        ExponentPair::new(&self.alpha * k, &self.beta * k)
    }

    /// Max-norm.
    pub fn norm(&self) -> Q {
        self.alpha.abs().max(self.beta.abs())
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Row-major 2×2 rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix2(pub [[Q; 2]; 2]);

impl Serialize for Matrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.0.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl Matrix2 {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        Matrix2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Matrix2::new(Q::one(), Q::zero(), Q::zero(), Q::one())
    }

    pub fn apply(&self, v: &ExponentPair) -> ExponentPair {
        let m = &self.0;
        ExponentPair::new(
            &m[0][0] * &v.alpha + &m[0][1] * &v.beta,
            &m[1][0] * &v.alpha + &m[1][1] * &v.beta,
        )
    }

    pub fn mul(&self, other: &Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &other.0);
        let entry = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Matrix2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))
    }

    pub fn det(&self) -> Q {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> Q {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let m = &self.0;
        Some(Matrix2::new(
            &m[1][1] / &det,
            -&m[0][1] / &det,
            -&m[1][0] / &det,
            &m[0][0] / &det,
        ))
    }

    pub fn column(&self, j: usize) -> ExponentPair {
        ExponentPair::new(self.0[0][j].clone(), self.0[1][j].clone())
    }
}

/// Characteristic data of a 2×2 matrix. Eigenvalues are reported only when rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    #[serde(serialize_with = "ser_q")]
    pub trace: Q,
    #[serde(serialize_with = "ser_q")]
    pub det: Q,
    #[serde(serialize_with = "ser_q")]
    pub discriminant: Q,
    /// Largest first.
    #[serde(serialize_with = "ser_opt_pair")]
    pub rational_eigenvalues: Option<(Q, Q)>,
}

fn ser_opt_pair<S: Serializer>(v: &Option<(Q, Q)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|(x, y)| [x.to_string(), y.to_string()]).serialize(s)
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let (n, d) = (v.numer().magnitude(), v.denom().magnitude());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(BigInt::from(rn), BigInt::from(rd)))
}

/// An affine exponent recursion `v ↦ c + M v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRecursion {
    pub c: ExponentPair,
    pub m: Matrix2,
}

impl AffineRecursion {
    pub fn step(&self, v: &ExponentPair) -> ExponentPair {
        self.c.add(&self.m.apply(v))
    }

    /// `c + Mc + … + M^n c`, i.e. `n + 1` steps from the origin.
    pub fn iterate(&self, n: u64) -> ExponentPair {
        let mut v = ExponentPair::zero();
        for _ in 0..=n {
            v = self.step(&v);
        }
        v
    }

    pub fn spectrum(&self) -> Spectrum {
        let trace = self.m.trace();
        let det = self.m.det();
        let discriminant = &trace * &trace - qi(4) * &det;
        let rational_eigenvalues = rational_sqrt(&discriminant).map(|root| {
            let two = qi(2);
            ((&trace + &root) / &two, (&trace - &root) / &two)
        });
        Spectrum { trace, det, discriminant, rational_eigenvalues }
    }
}

/// `θ = 6 + Δ` with `Δ ∈ [0, 6]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionConfig {
    pub theta: Q,
    pub delta: Q,
}

impl RecursionConfig {
    pub fn from_delta(delta: Q) -> Result<Self> {
        if delta.is_negative() || delta > qi(6) {
            return Err(Error::pre(format!("Δ = {delta} outside [0, 6]")));
        }
        Ok(RecursionConfig { theta: qi(6) + &delta, delta })
    }

    pub fn recursion(&self) -> AffineRecursion {
        let (c, m) = recursion_constants(&self.theta);
        AffineRecursion { c, m }
    }
}

/// `c = (-10/3, 14/3 - θ/2)` and `M = [[0, -1/3], [1/2, 7/6]]`.
pub fn recursion_constants(theta: &Q) -> (ExponentPair, Matrix2) {
    let c = ExponentPair::new(q(-10, 3), q(14, 3) - theta / qi(2));
    let m = Matrix2::new(qi(0), q(-1, 3), q(1, 2), q(7, 6));
    (c, m)
}

fn recursion(theta: &Q) -> AffineRecursion {
    let (c, m) = recursion_constants(theta);
    AffineRecursion { c, m }
}

pub fn step(pair: &ExponentPair, theta: &Q) -> ExponentPair {
    recursion(theta).step(pair)
}

pub fn iterate(n: u64, theta: &Q) -> ExponentPair {
    recursion(theta).iterate(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenData {
    #[serde(serialize_with = "ser_pair_array")]
    pub eigenvalues: [Q; 2],
    pub p: Matrix2,
    pub d: Matrix2,
    pub p_inverse: Matrix2,
}

fn ser_pair_array<S: Serializer>(v: &[Q; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    [v[0].to_string(), v[1].to_string()].serialize(s)
}

impl EigenData {
    /// `P D P⁻¹`.
    pub fn reconstruct(&self) -> Matrix2 {
        self.p.mul(&self.d).mul(&self.p_inverse)
    }
}

/// Eigendecomposition `M = P D P⁻¹` with eigenvalues `1` and `1/6`.
///
/// The eigenvalues come from the characteristic polynomial; each column of
/// `P` is checked to be an eigenvector before returning.
pub fn eigen_data() -> Result<EigenData> {
    let (_, m) = recursion_constants(&qi(6));
    let spectrum = AffineRecursion { c: ExponentPair::zero(), m: m.clone() }.spectrum();
    let (l1, l2) = spectrum
        .rational_eigenvalues
        .ok_or_else(|| Error::pre("recursion matrix has irrational eigenvalues"))?;
    let p = Matrix2::new(qi(-1), qi(-2), qi(3), qi(1));
    let d = Matrix2::new(l1.clone(), qi(0), qi(0), l2.clone());
    for (j, lambda) in [&l1, &l2].into_iter().enumerate() {
        let v = p.column(j);
        if m.apply(&v) != v.scale(lambda) {
            return Err(Error::pre(format!("column {j} of P is not an eigenvector for {lambda}")));
        }
    }
    let p_inverse = p.inverse().ok_or_else(|| Error::pre("P is singular"))?;
    let data = EigenData { eigenvalues: [l1, l2], p, d, p_inverse };
    if data.reconstruct() != m {
        return Err(Error::pre("P D P⁻¹ does not reproduce M"));
    }
    Ok(data)
}

/// Limit of `iterate(n, θ) / n`: `((6 - θ)/5)·(-1, 3)`.
pub fn asymptotic_direction(theta: &Q) -> ExponentPair {
    ExponentPair::new(qi(-1), qi(3)).scale(&((qi(6) - theta) / qi(5)))
}

/// `K` with `|iterate(n, θ)/n - direction|_∞ ≤ K/n` for all `n ≥ 1`.
///
/// Writing `c = γ1·v1 + γ2·v2` in the eigenbasis, the partial sum is
/// `(n+1)γ1·v1 + γ2·v2·(1 - λ2^{n+1})/(1 - λ2)`, so
/// `K = |γ1·v1| + |γ2·v2|/(1 - λ2)` bounds the remainder.
pub fn asymptotic_error_constant(theta: &Q) -> Result<Q> {
    let eig = eigen_data()?;
    let (c, _) = recursion_constants(theta);
    let gamma = eig.p_inverse.apply(&c);
    let v1 = eig.p.column(0).scale(&gamma.alpha);
    let v2 = eig.p.column(1).scale(&gamma.beta);
    let geometric = Q::one() / (Q::one() - &eig.eigenvalues[1]);
    Ok(v1.norm() + v2.norm() * geometric)
}

fn check_ab(a: &Q, b: &Q) -> Result<()> {
    if *a < Q::one() || a > b {
        return Err(Error::pre(format!("need 1 ≤ a ≤ b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// `E(n, Δ, a, b) = -2a - 4b + (3 - nΔ/6)(3b - a)`.
pub fn induction_exponent(n: &Q, delta: &Q, a: &Q, b: &Q) -> Result<Q> {
    if n.is_negative() {
        return Err(Error::pre("n must be nonnegative"));
    }
    check_ab(a, b)?;
    Ok(exponent_unchecked(n, delta, a, b))
}

fn exponent_unchecked(n: &Q, delta: &Q, a: &Q, b: &Q) -> Q {
    -qi(2) * a - qi(4) * b + (qi(3) - n * delta / qi(6)) * (qi(3) * b - a)
}

/// Both halves of the induction step:
/// (i) the exponent of `p` produced by the recursive estimate equals
///     `E(n, Δ, a, b) - Δb/2`, and
/// (ii) that is at most `E(n + 1, Δ, a, b)`.
pub fn verify_induction_step(n: &Q, delta: &Q, a: &Q, b: &Q) -> Result<bool> {
    induction_exponent(n, delta, a, b)?;
    if delta.is_negative() {
        return Err(Error::pre("Δ must be nonnegative"));
    }
    let two_b_minus_a = qi(2) * b - a;
    let three_b = qi(3) * b;
    let lemma_factor = q(-10, 3) * a + q(14, 3) * b;
    let from_recursion = lemma_factor
        + exponent_unchecked(n, delta, b, &two_b_minus_a) / qi(3)
        + exponent_unchecked(n, delta, b, &three_b) / qi(6)
        - (qi(6) + delta) * b / qi(2);
    let current = exponent_unchecked(n, delta, a, b);
    let target = &current - delta * b / qi(2);
    let next = exponent_unchecked(&(n + Q::one()), delta, a, b);
    Ok(from_recursion == target && target <= next)
}

/// Smallest `n` with `nΔ ≥ 39`; `None` when `Δ ≤ 0` (no contradiction available).
pub fn contradiction_threshold(delta: &Q) -> Option<BigInt> {
    if !delta.is_positive() {
        return None;
    }
    Some((qi(39) / delta).ceil().to_integer())
}

/// Admissible primes for the final step: `½X^{1/3^n} ≤ p ≤ X^{1/3^n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeWindow {
    /// Exact endpoints when `X` is a perfect `3^n`-th power of a rational.
    #[serde(serialize_with = "ser_opt_q")]
    pub lower: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub upper: Option<Q>,
    /// Smallest and largest integers inside the window.
    pub first_integer: String,
    pub last_integer: String,
    /// `X ≥ 10^{3^n}`.
    pub guaranteed: bool,
    /// Primes `≥ 5` in the window (listed when the window ends below 10^6).
    pub primes: Option<Vec<u64>>,
}

fn ser_opt_q<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|x| x.to_string()).serialize(s)
}

/// Largest `t` with `t^r ≤ v`.
fn floor_root(v: &BigUint, r: u32) -> BigUint {
    v.nth_root(r)
}

/// Smallest `t` with `t^r ≥ v`.
fn ceil_root(v: &BigUint, r: u32) -> BigUint {
    let t = v.nth_root(r);
    if t.pow(r) < *v {
        t + 1u32
    } else {
        t
    }
}

pub fn prime_window(n: u32, x: &Q) -> Result<PrimeWindow> {
    if n > 12 {
        return Err(Error::scale("n > 12 makes 3^n roots impractical"));
    }
    if *x < Q::one() {
        return Err(Error::pre("X must be at least 1"));
    }
    let r = 3u32.pow(n);
    let num = x.numer().magnitude().clone();
    let den = x.denom().magnitude().clone();

    let (rn, rd) = (floor_root(&num, r), floor_root(&den, r));
    let exact = (rn.pow(r) == num && rd.pow(r) == den).then(|| Q::new(BigInt::from(rn), BigInt::from(rd)));
    let lower = exact.as_ref().map(|u| u / qi(2));

    // p ≤ X^{1/r} ⇔ p^r ≤ ⌊X⌋;  ½X^{1/r} ≤ p ⇔ 2p ≥ smallest t with t^r ≥ ⌈X⌉.
    let floor_x = x.floor().to_integer().magnitude().clone();
    let ceil_x = x.ceil().to_integer().magnitude().clone();
    let last = floor_root(&floor_x, r);
    let first = ceil_root(&ceil_x, r).div_ceil(&BigUint::from(2u32));

    let guaranteed = *x >= Q::from_integer(BigInt::from(10u32).pow(r));
    let primes = match (first.to_u64(), last.to_u64()) {
        (Some(lo), Some(hi)) if hi < 1_000_000 => Some(primes_in(lo.max(5), hi)),
        _ => None,
    };
    Ok(PrimeWindow {
        lower,
        upper: exact,
        first_integer: first.to_string(),
        last_integer: last.to_string(),
        guaranteed,
        primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let (c, m) = recursion_constants(&qi(6));
        assert_eq!(c, ExponentPair::new(q(-10, 3), q(5, 3)));
        assert_eq!(recursion_constants(&q(28, 3)).0, ExponentPair::new(q(-10, 3), qi(0)));
        assert_eq!(recursion_constants(&qi(11)).1, m);
        assert_eq!(m.det(), q(1, 6));
        assert_eq!(m.trace(), q(7, 6));
    }

    #[test]
    fn step_examples() {
        let theta = qi(7);
        assert_eq!(step(&ExponentPair::zero(), &theta), ExponentPair::new(q(-10, 3), q(14, 3) - q(7, 2)));
        let fixed = ExponentPair::new(qi(-4), qi(2));
        assert_eq!(step(&fixed, &qi(6)), fixed);
        let u = ExponentPair::new(q(3, 7), q(-2, 5));
        let v = ExponentPair::new(qi(9), q(1, 11));
        let (_, m) = recursion_constants(&theta);
        assert_eq!(step(&u, &theta).sub(&step(&v, &theta)), m.apply(&u.sub(&v)));
    }

    #[test]
    fn iterate_is_partial_sum() {
        let theta = q(13, 2);
        let (c, m) = recursion_constants(&theta);
        assert_eq!(iterate(0, &theta), c);
        let mut power = Matrix2::identity();
        let mut sum = ExponentPair::zero();
        for n in 0..8 {
            sum = sum.add(&power.apply(&c));
            power = power.mul(&m);
            assert_eq!(iterate(n, &theta), sum);
            assert_eq!(iterate(n + 1, &theta), step(&iterate(n, &theta), &theta));
        }
    }

    #[test]
    fn theta_six_contracts_by_one_sixth() {
        let fixed = ExponentPair::new(qi(-4), qi(2));
        for n in 0..10 {
            let e0 = iterate(n, &qi(6)).sub(&fixed);
            let e1 = iterate(n + 1, &qi(6)).sub(&fixed);
            assert_eq!(e1, e0.scale(&q(1, 6)));
        }
    }

    #[test]
    fn eigen() {
        let e = eigen_data().unwrap();
        assert_eq!(e.eigenvalues, [qi(1), q(1, 6)]);
        assert_eq!(e.p, Matrix2::new(qi(-1), qi(-2), qi(3), qi(1)));
        assert_eq!(e.d, Matrix2::new(qi(1), qi(0), qi(0), q(1, 6)));
        let (_, m) = recursion_constants(&qi(6));
        assert_eq!(e.reconstruct(), m);
        assert_eq!(m.mul(&e.p), e.p.mul(&e.d));
    }

    #[test]
    fn spectrum_of_irrational_matrix() {
        let rec = AffineRecursion { c: ExponentPair::zero(), m: Matrix2::new(qi(1), qi(1), qi(1), qi(0)) };
        let spec = rec.spectrum();
        assert_eq!(spec.discriminant, qi(5));
        assert!(spec.rational_eigenvalues.is_none());
    }

    #[test]
    fn induction_examples() {
        let (one, six) = (qi(1), qi(6));
        assert_eq!(induction_exponent(&qi(1), &six, &one, &one).unwrap(), qi(-2));
        for (a, b) in [(1, 1), (1, 2), (2, 5)] {
            let (a, b) = (qi(a), qi(b));
            assert_eq!(
                induction_exponent(&qi(0), &q(5, 2), &a, &b).unwrap(),
                -qi(2) * &a - qi(4) * &b + qi(3) * (qi(3) * &b - &a)
            );
            // 3(3b - a) ≥ 2a + 4b for a ≤ b keeps the base exponent nonnegative.
            assert!(qi(3) * (qi(3) * &b - &a) >= qi(2) * &a + qi(4) * &b);
            assert_eq!(
                induction_exponent(&qi(4), &qi(0), &a, &b).unwrap(),
                induction_exponent(&qi(0), &qi(0), &a, &b).unwrap()
            );
        }
        assert!(induction_exponent(&qi(1), &six, &qi(2), &qi(1)).is_err());
        assert!(induction_exponent(&qi(-1), &six, &one, &one).is_err());
    }

    #[test]
    fn induction_step_examples() {
        assert!(verify_induction_step(&qi(1), &qi(6), &qi(1), &qi(1)).unwrap());
        assert!(verify_induction_step(&qi(3), &qi(0), &qi(2), &qi(7)).unwrap());
        assert!(verify_induction_step(&qi(1), &qi(-1), &qi(1), &qi(1)).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(contradiction_threshold(&qi(3)), Some(BigInt::from(13)));
        assert_eq!(contradiction_threshold(&qi(39)), Some(BigInt::from(1)));
        assert_eq!(contradiction_threshold(&qi(2)), Some(BigInt::from(20)));
        assert_eq!(contradiction_threshold(&q(39, 7)), Some(BigInt::from(7)));
        assert_eq!(contradiction_threshold(&qi(0)), None);
    }

    #[test]
    fn prime_windows() {
        let w = prime_window(0, &qi(100)).unwrap();
        assert_eq!((w.lower, w.upper), (Some(qi(50)), Some(qi(100))));
        assert!(w.guaranteed);
        assert!(!prime_window(0, &qi(9)).unwrap().guaranteed);
        let w = prime_window(1, &qi(1000)).unwrap();
        assert_eq!((w.lower.clone(), w.upper.clone()), (Some(qi(5)), Some(qi(10))));
        assert!(w.guaranteed);
        assert_eq!(w.primes, Some(vec![5, 7]));
        let w = prime_window(1, &qi(999)).unwrap();
        assert_eq!(w.upper, None);
        assert_eq!((w.first_integer.as_str(), w.last_integer.as_str()), ("5", "9"));
        assert!(!w.guaranteed);
    }

    #[test]
    fn guarantee_yields_prime() {
        for n in 0..=2u32 {
            let base = BigInt::from(10u32).pow(3u32.pow(n));
            for extra in [0u32, 1, 7, 12345] {
                let x = Q::from_integer(&base + BigInt::from(extra) * &base / BigInt::from(3));
                let w = prime_window(n, &x).unwrap();
                assert!(w.guaranteed);
                assert!(!w.primes.unwrap().is_empty(), "n={n} x={x}");
            }
        }
    }
}
