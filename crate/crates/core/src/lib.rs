//! Collatz level sets, orbit steadiness, and the slot/cluster structure
//! of the Collatz tree, computed with exact big-integer and big-rational
//! arithmetic.
//!
//! The crate is organized around five concerns:
//!
//! * [`orbit`] — the Collatz function, forward trajectories to 1, and
//!   parity bookkeeping ([`orbit::OrbitRecord`]).
//! * [`steadiness`] — exact orbit-steadiness products in two variants
//!   (literal over the orbit set, telescoping over odd-step images),
//!   their log-domain approximations, and the level identity
//!   `n = (2^ν / 6^κ) · σ̃(n)`.
//! * [`levels`] — level-set generation via the inverse recursion
//!   `L_{ν+1} = 2·L_ν ⊎ {(n−1)/3 : n ∈ L_ν, n > 4, n ≡ 4 (mod 6)}`.
//! * [`slots`] / [`clusters`] — slot intervals `[σ₀·2^ν/6^κ, 2^ν/6^κ]`,
//!   containment verdicts, and cluster detection by κ and by gap.
//! * [`scan`] — a checkpointed, resumable, parallel running-minimum scan
//!   estimating the steadiness infimum σ₀.
//!
//! All verdicts (containment, disjointness, cluster boundaries) are
//! decided with exact rational comparisons; floating point appears only
//! as a labeled approximation and as a candidate filter inside scans.

pub mod clusters;
pub mod io;
pub mod levels;
pub mod orbit;
pub mod ratio;
pub mod scan;
pub mod slots;
pub mod steadiness;
pub mod verify;

pub use clusters::{clusters_by_gap, clusters_by_kappa, compare_partitions, ClusterPartition};
pub use levels::{generate_levels, level_stats, next_level, LevelSet};
pub use orbit::{collatz_step, orbit_set_of, stream_stats, trajectory, OrbitRecord, DEFAULT_CAP};
pub use ratio::ExactRatio;
pub use scan::{merge_checkpoints, scan_min_sigma, ScanCheckpoint, ScanDomain, ScanMode};
pub use slots::{assign_and_verify, check_slot_conditions, slot_bounds, Slot, SlotAssignment};
pub use verify::{random_identity_check, run_suites, CheckResult, VerifySummary};
pub use steadiness::{
    sigma_literal, sigma_log2, sigma_telescoping, verify_level_identity, IdentityVerdict,
    SigmaMode, SteadinessValue,
};

use num_bigint::BigUint;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The orbit of `n` did not reach 1 within `cap` steps. This signals
    /// a possible non-tree member or a too-small cap; it is never
    /// silently treated as tree membership.
    #[error("orbit of {n} did not reach 1 within {cap} steps")]
    OrbitCapExceeded { n: BigUint, cap: u64 },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("empty scan domain")]
    EmptyDomain,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
