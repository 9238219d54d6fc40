//! Orbit steadiness in its two variants, plus the level identity.
//!
//! The literal steadiness σ(n) multiplies (k−1)/k over the orbit-set
//! elements k ≡ 4 (mod 6). The telescoping steadiness σ̃(n) multiplies
//! the same quotients over the odd-step images only, and satisfies
//! `n = (2^ν / 6^κ) · σ̃(n)` exactly. The two differ whenever an orbit
//! element ≡ 4 (mod 6) is entered by halving (the cycle element 4
//! always is), so both are first-class here and neither is silently
//! substituted for the other.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::orbit::{log2_term_biguint, Kahan, OrbitRecord};
use crate::ratio::ExactRatio;

/// Which factor set a steadiness product ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    Literal,
    Telescoping,
}

impl SigmaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaMode::Literal => "literal",
            SigmaMode::Telescoping => "telescoping",
        }
    }
}

/// An exact steadiness value with its labeled log₂ approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadinessValue {
    pub mode: SigmaMode,
    pub exact: ExactRatio,
    pub log2_approx: f64,
}

fn product_over<'a>(
    mode: SigmaMode,
    factors: impl Iterator<Item = &'a BigUint>,
) -> SteadinessValue {
    let mut exact = ExactRatio::one();
    let mut log2 = Kahan::default();
    let one = BigUint::one();
    for k in factors {
        let k_minus_1 = k - &one;
        exact.mul_fraction(&k_minus_1, k);
        log2.add(log2_term_biguint(k));
    }
    SteadinessValue {
        mode,
        exact,
        log2_approx: log2.value(),
    }
}

/// σ(n): product of (k−1)/k over the orbit set elements k ≡ 4 (mod 6),
/// each counted once. Always ≤ 3/4 since 4 ∈ R(n).
pub fn sigma_literal(rec: &OrbitRecord) -> SteadinessValue {
    let set = rec.orbit_set();
    product_over(
        SigmaMode::Literal,
        set.iter().filter(|k| (*k % 6u32) == BigUint::from(4u32)),
    )
}

/// σ̃(n): product of (k−1)/k over the odd-step images. Empty product
/// (κ = 0) is 1.
pub fn sigma_telescoping(rec: &OrbitRecord) -> SteadinessValue {
    product_over(SigmaMode::Telescoping, rec.odd_images.iter())
}

/// Log-domain fast path: the sum of log₂((k−1)/k) over the mode's
/// factor set, without exact arithmetic.
pub fn sigma_log2(rec: &OrbitRecord, mode: SigmaMode) -> f64 {
    let mut acc = Kahan::default();
    match mode {
        SigmaMode::Literal => {
            for k in rec.orbit_set().iter() {
                if (k % 6u32) == BigUint::from(4u32) {
                    acc.add(log2_term_biguint(k));
                }
            }
        }
        SigmaMode::Telescoping => {
            for k in &rec.odd_images {
                acc.add(log2_term_biguint(k));
            }
        }
    }
    acc.value()
}

/// Outcome of an exact identity check, carrying both sides on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum IdentityVerdict {
    Holds,
    Fails {
        #[serde(with = "crate::ratio::biguint_decimal")]
        lhs: BigUint,
        #[serde(with = "crate::ratio::biguint_decimal")]
        rhs: BigUint,
    },
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityVerdict::Holds)
    }
}

/// Checks `n · 6^κ · den(σ̃) = 2^ν · num(σ̃)` in exact integer
/// arithmetic, i.e. the telescoping form of the level identity
/// `n = (2^ν / 6^κ) · σ̃(n)`.
pub fn verify_level_identity(rec: &OrbitRecord) -> IdentityVerdict {
    let sigma = sigma_telescoping(rec);
    identity_sides(rec, &sigma.exact)
}

/// The same cross-multiplied check against an arbitrary steadiness
/// value. Used to witness that the literal form of the chain fails
/// where it does (e.g. n = 5).
pub fn identity_with(rec: &OrbitRecord, sigma: &ExactRatio) -> IdentityVerdict {
    identity_sides(rec, sigma)
}

fn identity_sides(rec: &OrbitRecord, sigma: &ExactRatio) -> IdentityVerdict {
    let six_pow = BigUint::from(6u32).pow(rec.kappa as u32);
    let two_pow = BigUint::one() << rec.nu as usize;
    let lhs = &rec.n * six_pow * sigma.den();
    let rhs = two_pow * sigma.num();
    if lhs == rhs {
        IdentityVerdict::Holds
    } else {
        IdentityVerdict::Fails { lhs, rhs }
    }
}
