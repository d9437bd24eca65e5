use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use super::{LemmaCheck, LemmaParams, LemmaReport, SweepConfig};
use crate::congruence::{self, lemma8_bound, SCongruenceParams, FEASIBILITY_LIMIT};
use crate::context::Counter;
use crate::counting::{Bound, CountQuery};
use crate::error::{Error, Result};

/// Upper bound for the ratio
/// `J(X) / (p·J(2X/p) + p^12·I_2(X;1,1))`, fixed as the maximum over
/// `p = 5`, `X ∈ {25, 30, 40, 50, 60}`. Regenerate with
/// `vmvt verify --lemmas 2 --primes 5 --x 25,30,40,50,60` (the `ratio`
/// notes) if the engine ever changes.
pub const LEMMA2_PINNED_CONSTANT: &str = "6611876041/3648907173005";

pub fn lemma2_pinned_constant() -> BigRational {
    let (n, d) = LEMMA2_PINNED_CONSTANT.split_once('/').unwrap_or((LEMMA2_PINNED_CONSTANT, "1"));
    BigRational::new(n.parse::<BigInt>().expect("pinned numerator"), d.parse::<BigInt>().expect("pinned denominator"))
}

fn big(v: u128) -> BigUint {
    BigUint::from(v)
}

fn pow(v: u64, e: u32) -> BigUint {
    BigUint::from(v).pow(e)
}

fn prime_power_at_most(p: u64, e: u32, x: Bound) -> bool {
    p.checked_pow(e).is_some_and(|pe| Bound::from_integer(pe) <= x)
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what()))
    }
}

fn require_prime_power(p: u64, e: u32, x: Bound) -> Result<()> {
    require(prime_power_at_most(p, e, x), || format!("{p}^{e} ≤ X fails for X = {x}"))
}

/// `2X / p^e` as an exact rational.
fn scaled_range(x: Bound, p: u64, e: u32) -> Result<Bound> {
    let pe = p.checked_pow(e).ok_or_else(|| Error::ScaleLimit(format!("{p}^{e} overflows")))?;
    let num = x.numer().checked_mul(2).ok_or_else(|| Error::ScaleLimit("2X overflows".into()))?;
    let den = x.denom().checked_mul(pe).ok_or_else(|| Error::ScaleLimit("X/p^e overflows".into()))?;
    Ok(Bound::new(num, den))
}

fn j(counter: &Counter, x: Bound) -> Result<BigUint> {
    counter.j(&CountQuery::cubic(x)).map(big)
}

fn i_m(counter: &Counter, x: Bound, p: u64, a: u32, b: u32, m: u32) -> Result<BigUint> {
    counter.i_max(&CountQuery::cubic(x), p, a, b, m).map(|r| big(r.count))
}

/// `I_0(X;a,b) ≤ J(2X/p^b)`, needs `p^b ≤ X`.
pub fn check_lemma1(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require_prime_power(p, b, x)?;
    let best = counter.i_max(&CountQuery::cubic(x), p, a, b, 0)?;
    let rhs = j(counter, scaled_range(x, p, b)?)?;
    Ok(LemmaReport::new(1, LemmaParams::xab(x, p, a, b), big(best.count), rhs)
        .with_note(format!("argmax eta={}", best.eta)))
}

/// `R = J(X) / (p·J(2X/p) + p^12·I_2(X;1,1))`, needs `p ≤ X`.
pub fn check_lemma2_ratio(counter: &Counter, x: Bound, p: u64) -> Result<BigRational> {
    require_prime_power(p, 1, x)?;
    let total = j(counter, x)?;
    let denom = pow(p, 1) * j(counter, scaled_range(x, p, 1)?)? + pow(p, 12) * i_m(counter, x, p, 1, 1, 2)?;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(denom)))
}

/// `R ≤ C_pin`, cleared: `J(X)·den ≤ num·(p·J(2X/p) + p^12·I_2(X;1,1))`.
pub fn check_lemma2(counter: &Counter, x: Bound, p: u64) -> Result<LemmaReport> {
    let ratio = check_lemma2_ratio(counter, x, p)?;
    let pin = lemma2_pinned_constant();
    let to_big = |v: &BigInt| v.to_biguint().expect("nonnegative");
    let lhs = to_big(ratio.numer()) * to_big(pin.denom());
    let rhs = to_big(pin.numer()) * to_big(ratio.denom());
    Ok(LemmaReport::new(2, LemmaParams::xp(x, p), lhs, rhs).with_note(format!("ratio={ratio}")))
}

/// `I_2(a,b)^3 ≤ I_2(b,a)·I_1(a,b)^2`.
pub fn check_lemma3(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    let lhs = i_m(counter, x, p, a, b, 2)?.pow(3);
    let rhs = i_m(counter, x, p, b, a, 2)? * i_m(counter, x, p, a, b, 1)?.pow(2);
    Ok(LemmaReport::new(3, LemmaParams::xab(x, p, a, b), lhs, rhs))
}

/// `I_1(a,b)^4 ≤ I_2(b,a)·J(2X/p^b)^3`, needs `p^b ≤ X`.
pub fn check_lemma4(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require_prime_power(p, b, x)?;
    let lhs = i_m(counter, x, p, a, b, 1)?.pow(4);
    let rhs = i_m(counter, x, p, b, a, 2)? * j(counter, scaled_range(x, p, b)?)?.pow(3);
    Ok(LemmaReport::new(4, LemmaParams::xab(x, p, a, b), lhs, rhs))
}

/// `I_1(a,b) ≤ p^{3b-a}·I_1(3b,b)`, needs `1 ≤ a ≤ 3b`.
pub fn check_lemma5(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require(a >= 1 && a <= 3 * b, || format!("1 ≤ a ≤ 3b fails for a = {a}, b = {b}"))?;
    let lhs = i_m(counter, x, p, a, b, 1)?;
    let rhs = pow(p, 3 * b - a) * i_m(counter, x, p, 3 * b, b, 1)?;
    Ok(LemmaReport::new(5, LemmaParams::xab(x, p, a, b), lhs, rhs))
}

/// `I_2(a,b) ≤ 2b·p^{4(b-a)}·I_2(2b-a,b)`, needs `1 ≤ a ≤ b`.
pub fn check_lemma6(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require(a >= 1 && a <= b, || format!("1 ≤ a ≤ b fails for a = {a}, b = {b}"))?;
    let lhs = i_m(counter, x, p, a, b, 2)?;
    let rhs = BigUint::from(2 * b) * pow(p, 4 * (b - a)) * i_m(counter, x, p, 2 * b - a, b, 2)?;
    Ok(LemmaReport::new(6, LemmaParams::xab(x, p, a, b), lhs, rhs))
}

/// The same bound with `I_2(2b-a, a)` on the right, as it appears at the end
/// of the argument. Recorded, never asserted.
pub fn check_lemma6_variant(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require(a >= 1 && a <= b, || format!("1 ≤ a ≤ b fails for a = {a}, b = {b}"))?;
    let lhs = i_m(counter, x, p, a, b, 2)?;
    let rhs = BigUint::from(2 * b) * pow(p, 4 * (b - a)) * i_m(counter, x, p, 2 * b - a, a, 2)?;
    Ok(LemmaReport::new(6, LemmaParams::xab(x, p, a, b), lhs, rhs)
        .with_variant("rhs-2b-a-a")
        .informational())
}

/// `I_2(a,b)^6 ≤ (2b)^6·p^{28b-20a}·I_2(b,2b-a)^2·I_2(b,3b)·J(2X/p^b)^3`,
/// needs `1 ≤ a ≤ b` and `p^b ≤ X`.
pub fn check_lemma7(counter: &Counter, x: Bound, p: u64, a: u32, b: u32) -> Result<LemmaReport> {
    require(a >= 1 && a <= b, || format!("1 ≤ a ≤ b fails for a = {a}, b = {b}"))?;
    require_prime_power(p, b, x)?;
    let lhs = i_m(counter, x, p, a, b, 2)?.pow(6);
    let rhs = BigUint::from(2 * b).pow(6)
        * pow(p, 28 * b - 20 * a)
        * i_m(counter, x, p, b, 2 * b - a, 2)?.pow(2)
        * i_m(counter, x, p, b, 3 * b, 2)?
        * j(counter, scaled_range(x, p, b)?)?.pow(3);
    Ok(LemmaReport::new(7, LemmaParams::xab(x, p, a, b), lhs, rhs))
}

/// `max_ν N(p;a,c) ≤ (c+1)p^{2c}`.
pub fn check_lemma8(counter: &Counter, p: u64, a: u32, c: u32) -> Result<LemmaReport> {
    let n = counter.n_max(p, a, c)?;
    Ok(LemmaReport::new(8, LemmaParams::pac(p, a, c), big(n), big(lemma8_bound(p, c))))
}

/// `N(p;a,c) ≤ 2p^{2c} + p^4·N(p;a+1,c-2)` for `c ≥ 2`.
pub fn check_lemma8_recursion(counter: &Counter, p: u64, a: u32, c: u32) -> Result<LemmaReport> {
    require(c >= 2, || "the recursion needs c ≥ 2".into())?;
    let lhs = counter.n_max(p, a, c)?;
    let rhs = 2 * (p as u128).pow(2 * c) + (p as u128).pow(4) * counter.n_max(p, a + 1, c - 2)?;
    Ok(LemmaReport::new(8, LemmaParams::pac(p, a, c), big(lhs), big(rhs)).with_variant("recursion"))
}

/// Nonsingular solutions number at most `2p^{2c}`.
fn check_lemma8_nonsingular(p: u64, a: u32, c: u32) -> Result<LemmaReport> {
    let mut worst = 0u128;
    let mut singular_at_worst = 0u128;
    for nu in 1..p as i64 {
        let (singular, nonsingular) = congruence::split_singular(&SCongruenceParams::new(p, nu, a, c))?;
        if nonsingular >= worst {
            worst = nonsingular;
            singular_at_worst = singular;
        }
    }
    let rhs = 2 * (p as u128).pow(2 * c);
    Ok(LemmaReport::new(8, LemmaParams::pac(p, a, c), big(worst), big(rhs))
        .with_variant("nonsingular")
        .with_note(format!("singular={singular_at_worst}")))
}

struct Lemma1;
struct Lemma2;
struct Lemma3;
struct Lemma4;
struct Lemma5;
struct Lemma6;
struct Lemma7;
struct Lemma8;

pub(super) fn all() -> Vec<Box<dyn LemmaCheck>> {
    vec![
        Box::new(Lemma1),
        Box::new(Lemma2),
        Box::new(Lemma3),
        Box::new(Lemma4),
        Box::new(Lemma5),
        Box::new(Lemma6),
        Box::new(Lemma7),
        Box::new(Lemma8),
    ]
}

fn xab(params: &LemmaParams) -> Result<(Bound, u32, u32)> {
    Ok((params.need_x()?, params.need_a()?, params.need_b()?))
}

fn admit_power(params: &LemmaParams, e: Option<u32>) -> std::result::Result<(), String> {
    match (params.x, e) {
        (Some(x), Some(e)) if prime_power_at_most(params.p, e, x) => Ok(()),
        (Some(x), Some(e)) => Err(format!("{}^{e} > X = {x}", params.p)),
        _ => Err("missing X or exponent".into()),
    }
}

fn admit_a_le_b(params: &LemmaParams) -> std::result::Result<(), String> {
    match (params.a, params.b) {
        (Some(a), Some(b)) if 1 <= a && a <= b => Ok(()),
        (a, b) => Err(format!("requires 1 ≤ a ≤ b (a = {a:?}, b = {b:?})")),
    }
}

fn admit_positive(params: &LemmaParams) -> std::result::Result<(), String> {
    match (params.x, params.a, params.b) {
        (Some(_), Some(a), Some(b)) if a >= 1 && b >= 1 => Ok(()),
        _ => Err("requires X and positive a, b".into()),
    }
}

impl LemmaCheck for Lemma1 {
    fn id(&self) -> u8 {
        1
    }

    fn statement(&self) -> &'static str {
        "I_0(X;a,b) <= J(2X/p^b)  [p^b <= X]"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)?;
        admit_power(params, params.b)
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![check_lemma1(counter, x, params.p, a, b)?])
    }
}

impl LemmaCheck for Lemma2 {
    fn id(&self) -> u8 {
        2
    }

    fn statement(&self) -> &'static str {
        "J(X) <= C_pin * (p J(2X/p) + p^12 I_2(X;1,1))  [p <= X]"
    }

    fn instances(&self, cfg: &SweepConfig) -> Vec<LemmaParams> {
        cfg.x.iter().flat_map(|&x| cfg.primes.iter().map(move |&p| LemmaParams::xp(x, p))).collect()
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_power(params, Some(1))
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        Ok(vec![check_lemma2(counter, params.need_x()?, params.p)?])
    }
}

impl LemmaCheck for Lemma3 {
    fn id(&self) -> u8 {
        3
    }

    fn statement(&self) -> &'static str {
        "I_2(X;a,b)^3 <= I_2(X;b,a) I_1(X;a,b)^2"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![check_lemma3(counter, x, params.p, a, b)?])
    }
}

impl LemmaCheck for Lemma4 {
    fn id(&self) -> u8 {
        4
    }

    fn statement(&self) -> &'static str {
        "I_1(X;a,b)^4 <= I_2(X;b,a) J(2X/p^b)^3  [p^b <= X]"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)?;
        admit_power(params, params.b)
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![check_lemma4(counter, x, params.p, a, b)?])
    }
}

impl LemmaCheck for Lemma5 {
    fn id(&self) -> u8 {
        5
    }

    fn statement(&self) -> &'static str {
        "I_1(X;a,b) <= p^(3b-a) I_1(X;3b,b)  [1 <= a <= 3b]"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)?;
        match (params.a, params.b) {
            (Some(a), Some(b)) if a <= 3 * b => Ok(()),
            _ => Err("requires a ≤ 3b".into()),
        }
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![check_lemma5(counter, x, params.p, a, b)?])
    }
}

impl LemmaCheck for Lemma6 {
    fn id(&self) -> u8 {
        6
    }

    fn statement(&self) -> &'static str {
        "I_2(X;a,b) <= 2b p^(4(b-a)) I_2(X;2b-a,b)  [1 <= a <= b]"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)?;
        admit_a_le_b(params)
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![
            check_lemma6(counter, x, params.p, a, b)?,
            check_lemma6_variant(counter, x, params.p, a, b)?,
        ])
    }
}

impl LemmaCheck for Lemma7 {
    fn id(&self) -> u8 {
        7
    }

    fn statement(&self) -> &'static str {
        "I_2(a,b)^6 <= (2b)^6 p^(28b-20a) I_2(b,2b-a)^2 I_2(b,3b) J(2X/p^b)^3  [1 <= a <= b, p^b <= X]"
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        admit_positive(params)?;
        admit_a_le_b(params)?;
        admit_power(params, params.b)
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (x, a, b) = xab(params)?;
        Ok(vec![check_lemma7(counter, x, params.p, a, b)?])
    }
}

impl LemmaCheck for Lemma8 {
    fn id(&self) -> u8 {
        8
    }

    fn statement(&self) -> &'static str {
        "max_nu N(p;a,c) <= (c+1) p^(2c)"
    }

    fn instances(&self, cfg: &SweepConfig) -> Vec<LemmaParams> {
        let exponents = cfg.exponents_a();
        let mut out = Vec::new();
        for &p in &cfg.primes {
            for &a in &exponents {
                for &c in &cfg.levels {
                    out.push(LemmaParams::pac(p, a, c));
                }
            }
        }
        out
    }

    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String> {
        let (Some(a), Some(c)) = (params.a, params.c) else {
            return Err("requires a and c".into());
        };
        if a == 0 {
            return Err("requires a ≥ 1".into());
        }
        let points = (params.p as u128).checked_pow(4 * c).unwrap_or(u128::MAX);
        if points > FEASIBILITY_LIMIT {
            return Err(format!("{}^{} quadruples exceed the enumeration limit", params.p, 4 * c));
        }
        Ok(())
    }

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>> {
        let (p, a, c) = (params.p, params.need_a()?, params.need_c()?);
        let mut out = vec![check_lemma8(counter, p, a, c)?, check_lemma8_nonsingular(p, a, c)?];
        if c >= 2 {
            out.push(check_lemma8_recursion(counter, p, a, c)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn x(n: u64) -> Bound {
        Bound::from_integer(n)
    }

    #[test]
    fn lemma1_examples() {
        let counter = Counter::in_memory();
        assert!(check_lemma1(&counter, x(30), 5, 1, 1).unwrap().holds);
        let r = check_lemma1(&counter, x(25), 5, 2, 2).unwrap();
        assert_eq!(r.lhs, BigUint::one());
        assert_eq!(r.rhs, BigUint::from(924u32));
        let a1 = check_lemma1(&counter, x(30), 5, 1, 1).unwrap();
        let a3 = check_lemma1(&counter, x(30), 5, 3, 1).unwrap();
        assert!(a3.holds);
        assert_eq!(a1.lhs, a3.lhs);
        assert!(check_lemma1(&counter, x(24), 5, 1, 2).is_err());
    }

    #[test]
    fn lemma3_symmetric_case() {
        let counter = Counter::in_memory();
        let r = check_lemma3(&counter, x(30), 5, 1, 1).unwrap();
        assert!(r.holds);
        let i2 = i_m(&counter, x(30), 5, 1, 1, 2).unwrap();
        let i1 = i_m(&counter, x(30), 5, 1, 1, 1).unwrap();
        assert!(i2 <= i1);
    }

    #[test]
    fn lemma5_and_6_small() {
        let counter = Counter::in_memory();
        assert!(check_lemma5(&counter, x(30), 5, 1, 1).unwrap().holds);
        let r = check_lemma6(&counter, x(30), 5, 1, 1).unwrap();
        assert_eq!(r.rhs, BigUint::from(2u32) * &r.lhs);
        assert!(check_lemma6(&counter, x(30), 5, 2, 1).is_err());
        assert!(check_lemma5(&counter, x(30), 5, 4, 1).is_err());
    }

    #[test]
    fn lemma7_small() {
        let counter = Counter::in_memory();
        assert!(check_lemma7(&counter, x(25), 5, 1, 1).unwrap().holds);
        assert!(check_lemma7(&counter, x(4), 5, 1, 1).is_err());
    }

    #[test]
    fn degenerate_zero_counts_hold() {
        // ⌊X⌋ = 0: every class is empty.
        let counter = Counter::in_memory();
        let r = check_lemma3(&counter, Bound::new(1, 2), 5, 1, 1).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (BigUint::zero(), BigUint::zero()));
        assert!(r.holds);
        let r = check_lemma5(&counter, Bound::new(1, 2), 5, 1, 1).unwrap();
        assert!(r.holds && r.lhs.is_zero());
    }

    #[test]
    fn lemma8_reports() {
        let counter = Counter::in_memory();
        let r = check_lemma8(&counter, 5, 1, 1).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (BigUint::from(45u32), BigUint::from(50u32)));
        assert!(check_lemma8_recursion(&counter, 5, 1, 2).unwrap().holds);
        assert!(check_lemma8_recursion(&counter, 5, 1, 1).is_err());
    }
}
