//! Slot intervals S_{ν,κ} = [σ₀·2^ν/6^κ, 2^ν/6^κ], containment of
//! level sets in their slots, and the disjointness/separation
//! conditions on σ₀. All verdicts use exact rational comparisons.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::levels::{kappas_of, LevelSet};
use crate::ratio::ExactRatio;
use crate::{Error, Result};

/// The interval predicted to contain the κ-th cluster of L_ν.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub nu: u32,
    pub kappa: u32,
    pub lower: ExactRatio,
    pub upper: ExactRatio,
    pub sigma0_used: ExactRatio,
}

fn check_sigma0(sigma0: &ExactRatio) -> Result<()> {
    if sigma0.is_zero() || *sigma0 > ExactRatio::one() {
        return Err(Error::InvalidInput(format!(
            "sigma0 must lie in (0, 1], got {sigma0}"
        )));
    }
    Ok(())
}

/// Exact slot endpoints: upper = 2^ν/6^κ, lower = σ₀ · upper.
pub fn slot_bounds(nu: u32, kappa: u32, sigma0: &ExactRatio) -> Result<Slot> {
    check_sigma0(sigma0)?;
    let upper = ExactRatio::pow2_over_pow6(nu, kappa);
    let lower = sigma0.mul(&upper);
    Ok(Slot {
        nu,
        kappa,
        lower,
        upper,
        sigma0_used: sigma0.clone(),
    })
}

/// One element's slot membership data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotEntry {
    #[serde(with = "crate::ratio::biguint_decimal")]
    pub n: BigUint,
    pub kappa: u64,
    /// n · 6^κ / 2^ν, exactly; equals σ̃(n) by the level identity.
    pub ratio: ExactRatio,
    pub in_slot: bool,
}

/// The verdict of mapping every element of a level set into its slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAssignment {
    pub nu: u32,
    pub sigma0_used: ExactRatio,
    pub entries: Vec<SlotEntry>,
    /// True iff every entry satisfies σ₀ ≤ ratio ≤ 1.
    pub contained: bool,
}

/// Maps every element of `level` to S_{ν,κ(n)} and checks containment.
/// The upper bound ratio ≤ 1 must hold unconditionally for level-set
/// elements; a violation is an integrity error, not a verdict.
pub fn assign_and_verify(level: &LevelSet, sigma0: &ExactRatio) -> Result<SlotAssignment> {
    check_sigma0(sigma0)?;
    level.validate()?;
    let kappas = kappas_of(level)?;
    let one = ExactRatio::one();
    let mut entries = Vec::with_capacity(level.len());
    let mut contained = true;
    for (n, kappa) in level.elements.iter().zip(kappas) {
        let six_pow = BigUint::from(6u32).pow(kappa as u32);
        let two_pow = BigUint::one() << level.nu as usize;
        let ratio = ExactRatio::new(n * six_pow, two_pow)?;
        if ratio > one {
            return Err(Error::Integrity(format!(
                "element {n} of level {} has ratio {ratio} > 1",
                level.nu
            )));
        }
        let in_slot = ratio >= *sigma0;
        contained &= in_slot;
        entries.push(SlotEntry {
            n: n.clone(),
            kappa,
            ratio,
            in_slot,
        });
    }
    Ok(SlotAssignment {
        nu: level.nu,
        sigma0_used: sigma0.clone(),
        entries,
        contained,
    })
}

/// Disjointness and separation verdicts for a given σ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotConditions {
    /// Slots S_{ν,κ} pairwise disjoint ⟺ σ₀ > 1/6.
    pub disjoint: bool,
    /// max S_{ν,κ} < (1/3)·min S_{ν,κ−1} ⟺ σ₀ > 1/2.
    pub separated: bool,
}

/// Checks the two threshold conditions exactly. When the threshold form
/// says disjoint or separated, the interval inequality behind it is
/// additionally verified on the whole grid ν ≤ 30, 1 ≤ κ ≤ ν; any grid
/// disagreement would be an internal inconsistency.
pub fn check_slot_conditions(sigma0: &ExactRatio) -> Result<SlotConditions> {
    check_sigma0(sigma0)?;
    let one_sixth = ExactRatio::from_u64s(1, 6).unwrap();
    let one_half = ExactRatio::from_u64s(1, 2).unwrap();
    let disjoint = *sigma0 > one_sixth;
    let separated = *sigma0 > one_half;

    let one_third = ExactRatio::from_u64s(1, 3).unwrap();
    for nu in 0u32..=30 {
        for kappa in 1..=nu {
            let slot = slot_bounds(nu, kappa, sigma0)?;
            let prev = slot_bounds(nu, kappa - 1, sigma0)?;
            if disjoint && slot.upper >= prev.lower {
                return Err(Error::Integrity(format!(
                    "disjointness grid check failed at nu={nu} kappa={kappa}"
                )));
            }
            if separated && slot.upper >= one_third.mul(&prev.lower) {
                return Err(Error::Integrity(format!(
                    "separation grid check failed at nu={nu} kappa={kappa}"
                )));
            }
        }
    }
    Ok(SlotConditions {
        disjoint,
        separated,
    })
}
