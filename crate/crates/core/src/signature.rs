//! Power-sum signatures and their packed single-word encoding.
//!
//! Two groups of variables solve the cubic system exactly when their
//! signatures `(Σx, Σx², Σx³)` coincide, so every count in this crate is
//! a statement about the multiplicity distribution of signatures.
//!
//! Packed layout (a stable contract, cache files store these keys):
//!
//! ```text
//!  63            32 31          12 11       0
//! +----------------+--------------+----------+
//! |       e3       |      e2      |    e1    |
//! +----------------+--------------+----------+
//! ```
//!
//! Packing is additive as long as no field overflows, which lets the
//! convolution code add packed keys directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const E1_BITS: u32 = 12;
pub const E2_BITS: u32 = 20;
pub const E3_BITS: u32 = 32;

pub const E1_LIMIT: u64 = 1 << E1_BITS;
pub const E2_LIMIT: u64 = 1 << E2_BITS;
pub const E3_LIMIT: u64 = 1 << E3_BITS;

/// Largest degree whose power sums are tracked.
pub const MAX_DEGREE: u32 = 3;

/// The triple of power sums of a variable group. Unused components are zero
/// when the degree is below three.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerSumSignature {
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
}

impl PowerSumSignature {
    pub const ZERO: PowerSumSignature = PowerSumSignature { e1: 0, e2: 0, e3: 0 };

    pub fn new(e1: u64, e2: u64, e3: u64) -> Self {
        PowerSumSignature { e1, e2, e3 }
    }

    pub fn pack(&self) -> Result<u64> {
        if self.e1 >= E1_LIMIT || self.e2 >= E2_LIMIT || self.e3 >= E3_LIMIT {
            return Err(Error::scale(format!(
                "signature ({}, {}, {}) does not fit the packed layout",
                self.e1, self.e2, self.e3
            )));
        }
        Ok(self.e1 | (self.e2 << E1_BITS) | (self.e3 << (E1_BITS + E2_BITS)))
    }

    pub fn unpack(key: u64) -> Self {
        PowerSumSignature {
            e1: key & (E1_LIMIT - 1),
            e2: (key >> E1_BITS) & (E2_LIMIT - 1),
            e3: key >> (E1_BITS + E2_BITS),
        }
    }
}

/// Computes the power-sum signature of `values` up to degree `k`.
///
/// Rejects zero values, degrees above three, and any component that would
/// not fit the packed layout.
pub fn signature_of(values: &[u64], k: u32) -> Result<PowerSumSignature> {
    if k == 0 || k > MAX_DEGREE {
        return Err(Error::scale(format!("degree {k} not supported (1..=3)")));
    }
    let mut sums = [0u64; 3];
    for &v in values {
        if v == 0 {
            return Err(Error::pre("signature values must be positive"));
        }
        let mut power = 1u64;
        for (j, sum) in sums.iter_mut().enumerate().take(k as usize) {
            power = power
                .checked_mul(v)
                .ok_or_else(|| Error::scale(format!("{v}^{} overflows", j + 1)))?;
            *sum = sum
                .checked_add(power)
                .ok_or_else(|| Error::scale("power sum overflows 64 bits"))?;
        }
    }
    let sig = PowerSumSignature::new(sums[0], sums[1], sums[2]);
    sig.pack()?;
    Ok(sig)
}

/// Packed key of a single value, used as the additive building block of
/// group signatures.
pub(crate) fn packed_term(v: u64, k: u32) -> u64 {
    let e1 = v;
    let e2 = if k >= 2 { v * v } else { 0 };
    let e3 = if k >= 3 { v * v * v } else { 0 };
    e1 | (e2 << E1_BITS) | (e3 << (E1_BITS + E2_BITS))
}

/// Verifies that every group of `group` values drawn from `1..=max_value`
/// has a signature inside the packed layout.
pub fn check_packed_range(max_value: u64, group: u32, k: u32) -> Result<()> {
    let g = group as u128;
    let n = max_value as u128;
    let ok = g * n < E1_LIMIT as u128
        && (k < 2 || g * n * n < E2_LIMIT as u128)
        && (k < 3 || g * n * n * n < E3_LIMIT as u128);
    if ok {
        Ok(())
    } else {
        Err(Error::scale(format!(
            "groups of {group} values up to {max_value} exceed the packed signature layout"
        )))
    }
}
