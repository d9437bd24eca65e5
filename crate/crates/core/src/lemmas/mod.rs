//! Machine checks of the lemma inequalities as exact integer comparisons.
//!
//! Fractional powers are cleared by raising both sides to the lcm of the
//! exponent denominators, so every verdict is an integer comparison. Each
//! lemma is a [`LemmaCheck`] registered by id; sweeps pick checks by id.

mod checks;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::context::Counter;
use crate::counting::Bound;
use crate::error::{Error, Result};
use crate::primes::is_prime;

pub use checks::{
    check_lemma1, check_lemma2, check_lemma2_ratio, check_lemma3, check_lemma4, check_lemma5, check_lemma6,
    check_lemma6_variant, check_lemma7, check_lemma8, check_lemma8_recursion, lemma2_pinned_constant,
    LEMMA2_PINNED_CONSTANT,
};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct LemmaParams {
    #[serde(serialize_with = "ser_opt_bound")]
    pub x: Option<Bound>,
    pub p: u64,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub c: Option<u32>,
}

fn ser_opt_bound<S: Serializer>(v: &Option<Bound>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.map(|x| x.to_string()).serialize(s)
}

impl LemmaParams {
    pub fn xab(x: Bound, p: u64, a: u32, b: u32) -> Self {
        LemmaParams { x: Some(x), p, a: Some(a), b: Some(b), c: None }
    }

    pub fn xp(x: Bound, p: u64) -> Self {
        LemmaParams { x: Some(x), p, ..Default::default() }
    }

    pub fn pac(p: u64, a: u32, c: u32) -> Self {
        LemmaParams { x: None, p, a: Some(a), b: None, c: Some(c) }
    }

    pub(crate) fn need_x(&self) -> Result<Bound> {
        self.x.ok_or_else(|| Error::pre("X is required"))
    }

    pub(crate) fn need_a(&self) -> Result<u32> {
        self.a.ok_or_else(|| Error::pre("a is required"))
    }

    pub(crate) fn need_b(&self) -> Result<u32> {
        self.b.ok_or_else(|| Error::pre("b is required"))
    }

    pub(crate) fn need_c(&self) -> Result<u32> {
        self.c.ok_or_else(|| Error::pre("c is required"))
    }
}

impl fmt::Display for LemmaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(x) = self.x {
            parts.push(format!("X={x}"));
        }
        parts.push(format!("p={}", self.p));
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        f.write_str(&parts.join(" "))
    }
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_slack<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&slack_string(v))
}

pub fn slack_string(v: &Option<BigRational>) -> String {
    v.as_ref().map_or_else(|| "inf".to_string(), |r| r.to_string())
}

/// One verified instance of an inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma_id: u8,
    /// Names a secondary form of the lemma (e.g. a recursion step).
    pub variant: Option<&'static str>,
    /// Informational reports are recorded but never fail a sweep.
    pub informational: bool,
    pub params: LemmaParams,
    #[serde(serialize_with = "ser_big")]
    pub lhs: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub rhs: BigUint,
    pub holds: bool,
    /// `rhs / lhs`; `None` stands for infinity (`lhs = 0`).
    #[serde(serialize_with = "ser_slack")]
    pub slack: Option<BigRational>,
    pub note: Option<String>,
}

impl LemmaReport {
    pub fn new(lemma_id: u8, params: LemmaParams, lhs: BigUint, rhs: BigUint) -> Self {
        let holds = lhs <= rhs;
        let slack = (!lhs.is_zero())
            .then(|| BigRational::new(BigInt::from(rhs.clone()), BigInt::from(lhs.clone())));
        LemmaReport { lemma_id, variant: None, informational: false, params, lhs, rhs, holds, slack, note: None }
    }

    pub fn with_variant(mut self, variant: &'static str) -> Self {
        self.variant = Some(variant);
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A failed non-informational report.
    pub fn is_failure(&self) -> bool {
        !self.holds && !self.informational
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SweepOutcome {
    Checked(LemmaReport),
    Skipped { lemma_id: u8, params: LemmaParams, reason: String },
    Errored { lemma_id: u8, params: LemmaParams, error: String },
}

impl SweepOutcome {
    pub fn lemma_id(&self) -> u8 {
        match self {
            SweepOutcome::Checked(r) => r.lemma_id,
            SweepOutcome::Skipped { lemma_id, .. } | SweepOutcome::Errored { lemma_id, .. } => *lemma_id,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational_failed: usize,
    pub skipped: usize,
    pub errored: usize,
}

impl SweepSummary {
    pub fn of(outcomes: &[SweepOutcome]) -> Self {
        let mut s = SweepSummary::default();
        for o in outcomes {
            match o {
                SweepOutcome::Checked(r) => {
                    s.checked += 1;
                    match (r.holds, r.informational) {
                        (true, _) => s.passed += 1,
                        (false, false) => s.failed += 1,
                        (false, true) => s.informational_failed += 1,
                    }
                }
                SweepOutcome::Skipped { .. } => s.skipped += 1,
                SweepOutcome::Errored { .. } => s.errored += 1,
            }
        }
        s
    }

    pub fn all_hold(&self) -> bool {
        self.failed == 0 && self.errored == 0
    }
}

/// Parameter grid for a sweep. `X` values are rationals written as
/// integers or `"num/den"` strings in config files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_xs", deserialize_with = "de_bounds", serialize_with = "ser_bounds")]
    pub x: Vec<Bound>,
    #[serde(default = "default_pairs")]
    pub pairs: Vec<(u32, u32)>,
    #[serde(default = "default_lemmas")]
    pub lemmas: Vec<u8>,
    /// Modulus exponents `c` for the congruence-count checks.
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
}

fn default_primes() -> Vec<u64> {
    vec![5, 7]
}

fn default_xs() -> Vec<Bound> {
    [25, 30, 40, 50, 60].into_iter().map(Bound::from_integer).collect()
}

fn default_pairs() -> Vec<(u32, u32)> {
    (1..=3).flat_map(|a| (1..=3).map(move |b| (a, b))).collect()
}

fn default_lemmas() -> Vec<u8> {
    (1..=8).collect()
}

fn default_levels() -> Vec<u32> {
    (0..=3).collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoundRepr {
    Int(u64),
    Text(String),
}

fn de_bounds<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Bound>, D::Error> {
    Vec::<BoundRepr>::deserialize(d)?
        .into_iter()
        .map(|r| match r {
            BoundRepr::Int(n) => Ok(Bound::from_integer(n)),
            BoundRepr::Text(t) => parse_bound(&t).map_err(serde::de::Error::custom),
        })
        .collect()
}

fn ser_bounds<S: Serializer>(v: &[Bound], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
}

/// Parses `"n"` or `"num/den"`.
pub fn parse_bound(text: &str) -> Result<Bound> {
    let text = text.trim();
    let parsed = match text.split_once('/') {
        Some((n, d)) => n.trim().parse::<u64>().ok().zip(d.trim().parse::<u64>().ok()),
        None => text.parse::<u64>().ok().map(|n| (n, 1)),
    };
    match parsed {
        Some((_, 0)) | None => Err(Error::pre(format!("`{text}` is not a nonnegative rational"))),
        Some((n, d)) => Ok(Bound::new(n, d)),
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primes: default_primes(),
            x: default_xs(),
            pairs: default_pairs(),
            lemmas: default_lemmas(),
            levels: default_levels(),
        }
    }
}

impl SweepConfig {
    pub fn empty() -> Self {
        SweepConfig { primes: vec![], x: vec![], pairs: vec![], lemmas: vec![], levels: vec![] }
    }

    pub fn validate(&self, registry: &LemmaRegistry) -> Result<()> {
        if let Some(p) = self.primes.iter().find(|&&p| p < 5 || !is_prime(p)) {
            return Err(Error::pre(format!("sweep prime {p} is not a prime ≥ 5")));
        }
        if let Some(id) = self.lemmas.iter().find(|&&id| registry.get(id).is_none()) {
            return Err(Error::pre(format!("no check registered for lemma {id}")));
        }
        Ok(())
    }

    /// Distinct exponents appearing in the `(a, b)` pairs, ascending.
    pub fn exponents_a(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.pairs.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub trait LemmaCheck: Send + Sync {
    fn id(&self) -> u8;

    /// The inequality in cleared integer form.
    fn statement(&self) -> &'static str;

    /// Parameter tuples this check visits for a sweep, in canonical order.
    fn instances(&self, cfg: &SweepConfig) -> Vec<LemmaParams> {
        let mut out = Vec::new();
        for &x in &cfg.x {
            for &p in &cfg.primes {
                for &(a, b) in &cfg.pairs {
                    out.push(LemmaParams::xab(x, p, a, b));
                }
            }
        }
        out
    }

    /// `Err(reason)` when the tuple violates the lemma's hypotheses.
    fn admissible(&self, params: &LemmaParams) -> std::result::Result<(), String>;

    fn check(&self, counter: &Counter, params: &LemmaParams) -> Result<Vec<LemmaReport>>;
}

pub struct LemmaRegistry {
    checks: Vec<Box<dyn LemmaCheck>>,
}

impl LemmaRegistry {
    pub fn empty() -> Self {
        LemmaRegistry { checks: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        for check in checks::all() {
            r.register(check);
        }
        r
    }

    pub fn register(&mut self, check: Box<dyn LemmaCheck>) {
        self.checks.retain(|c| c.id() != check.id());
        self.checks.push(check);
        self.checks.sort_by_key(|c| c.id());
    }

    pub fn get(&self, id: u8) -> Option<&dyn LemmaCheck> {
        self.checks.iter().find(|c| c.id() == id).map(|c| c.as_ref())
    }

    pub fn ids(&self) -> Vec<u8> {
        self.checks.iter().map(|c| c.id()).collect()
    }
}

impl Default for LemmaRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

/// Runs every selected check on every tuple of the grid. Inadmissible tuples
/// are reported as skipped; per-instance errors are recorded, not raised.
/// Output order is canonical (lemma id, then grid order) regardless of threading.
pub fn run_sweep(counter: &Counter, registry: &LemmaRegistry, cfg: &SweepConfig) -> Result<Vec<SweepOutcome>> {
    cfg.validate(registry)?;
    let mut ids = cfg.lemmas.clone();
    ids.sort_unstable();
    ids.dedup();
    let mut jobs = Vec::new();
    for id in ids {
        let check = registry.get(id).expect("validated");
        for params in check.instances(cfg) {
            jobs.push((check, params));
        }
    }
    let outcomes: Vec<Vec<SweepOutcome>> = jobs
        .par_iter()
        .map(|(check, params)| {
            let id = check.id();
            if let Err(reason) = check.admissible(params) {
                return vec![SweepOutcome::Skipped { lemma_id: id, params: params.clone(), reason }];
            }
            match check.check(counter, params) {
                Ok(reports) => reports.into_iter().map(SweepOutcome::Checked).collect(),
                Err(e) if e.is_scale_limit() => {
                    vec![SweepOutcome::Skipped { lemma_id: id, params: params.clone(), reason: e.to_string() }]
                }
                Err(e) => vec![SweepOutcome::Errored { lemma_id: id, params: params.clone(), error: e.to_string() }],
            }
        })
        .collect();
    Ok(outcomes.into_iter().flatten().collect())
}
