//! Level sets of the Collatz tree, generated by the inverse recursion
//!
//! ```text
//! L_{ν+1} = {2n : n ∈ L_ν} ⊎ {(n−1)/3 : n ∈ L_ν, n > 4, n ≡ 4 (mod 6)}
//! ```
//!
//! starting from L₀ = {1}. Generation is iterative and never searches
//! forward over ℕ: the recursion is complete and exact, so each emitted
//! level is the whole of L_ν. Elements are kept as a sorted sequence;
//! the two branches of the recursion preserve order individually and
//! are combined by a linear merge. Disjointness of the branches is a
//! parity fact (doubles are even, (n−1)/3 values are odd) and is
//! asserted rather than assumed.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::orbit::{stream_stats, DEFAULT_CAP};
use crate::{Error, Result};

/// A complete level set L_ν: ν plus the ascending distinct elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub nu: u32,
    pub elements: Vec<BigUint>,
}

impl LevelSet {
    /// L₀ = {1}.
    pub fn root() -> Self {
        LevelSet {
            nu: 0,
            elements: vec![BigUint::one()],
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Structural validation: strictly ascending, non-empty, and
    /// max = 2^ν present.
    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::Integrity(format!("level {} is empty", self.nu)));
        }
        for w in self.elements.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Integrity(format!(
                    "level {} is not strictly ascending near {}",
                    self.nu, w[0]
                )));
            }
        }
        let expected_max = BigUint::one() << self.nu as usize;
        if *self.elements.last().unwrap() != expected_max {
            return Err(Error::Integrity(format!(
                "level {} max is {}, expected 2^{} = {}",
                self.nu,
                self.elements.last().unwrap(),
                self.nu,
                expected_max
            )));
        }
        Ok(())
    }
}

/// Applies the inverse recursion once: L_ν → L_{ν+1}.
pub fn next_level(level: &LevelSet) -> LevelSet {
    let four = BigUint::from(4u32);
    let six = BigUint::from(6u32);
    let doubles: Vec<BigUint> = level.elements.iter().map(|n| n << 1).collect();
    let thirds: Vec<BigUint> = level
        .elements
        .iter()
        .filter(|n| **n > four && (*n % &six) == four)
        .map(|n| (n - 1u32) / 3u32)
        .collect();

    // Doubles are even, (n−1)/3 values are odd (n ≡ 4 mod 6 makes n−1
    // ≡ 3 mod 6), so the union is genuinely disjoint.
    let mut merged = Vec::with_capacity(doubles.len() + thirds.len());
    let (mut i, mut j) = (0, 0);
    while i < doubles.len() && j < thirds.len() {
        debug_assert_ne!(doubles[i], thirds[j]);
        if doubles[i] < thirds[j] {
            merged.push(doubles[i].clone());
            i += 1;
        } else {
            merged.push(thirds[j].clone());
            j += 1;
        }
    }
    merged.extend_from_slice(&doubles[i..]);
    merged.extend_from_slice(&thirds[j..]);

    LevelSet {
        nu: level.nu + 1,
        elements: merged,
    }
}

/// Per-level cardinalities returned by [`generate_levels`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSummary {
    pub nu_max: u32,
    pub cardinalities: Vec<u64>,
}

/// Emits L₀ … L_{nu_max} in order, each exactly once, keeping at most
/// two consecutive levels resident. A sink failure propagates with the
/// level index at which it occurred.
pub fn generate_levels<F>(nu_max: u32, mut sink: F) -> Result<LevelSummary>
where
    F: FnMut(&LevelSet) -> Result<()>,
{
    let mut current = LevelSet::root();
    let mut cardinalities = Vec::with_capacity(nu_max as usize + 1);
    loop {
        cardinalities.push(current.len() as u64);
        sink(&current).map_err(|e| match e {
            Error::Integrity(msg) => {
                Error::Integrity(format!("sink failed at level {}: {msg}", current.nu))
            }
            other => other,
        })?;
        if current.nu == nu_max {
            break;
        }
        current = next_level(&current);
    }
    Ok(LevelSummary {
        nu_max,
        cardinalities,
    })
}

/// Convenience: materializes a single level set.
pub fn level(nu: u32) -> LevelSet {
    let mut current = LevelSet::root();
    while current.nu < nu {
        current = next_level(&current);
    }
    current
}

/// Summary statistics of a level set, with κ computed per element from
/// its trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub count: u64,
    pub min: BigUint,
    pub max: BigUint,
    pub kappa_histogram: BTreeMap<u64, u64>,
}

pub fn level_stats(level: &LevelSet) -> Result<LevelStats> {
    level.validate()?;
    let kappas = kappas_of(level)?;
    let mut histogram = BTreeMap::new();
    for k in kappas {
        *histogram.entry(k).or_insert(0u64) += 1;
    }
    Ok(LevelStats {
        count: level.len() as u64,
        min: level.elements.first().unwrap().clone(),
        max: level.elements.last().unwrap().clone(),
        kappa_histogram: histogram,
    })
}

/// κ per element, in element order. Parallel per element with
/// deterministic assembly; elements of a generated level set reach 1 by
/// construction, so a cap overrun here is an internal error.
pub fn kappas_of(level: &LevelSet) -> Result<Vec<u64>> {
    level
        .elements
        .par_iter()
        .map(|n| {
            stream_stats(n, DEFAULT_CAP)
                .map(|s| {
                    debug_assert_eq!(s.nu, level.nu as u64);
                    s.kappa
                })
                .map_err(|_| {
                    Error::Integrity(format!(
                        "element {n} of level {} exceeded the iteration cap",
                        level.nu
                    ))
                })
        })
        .collect()
}
