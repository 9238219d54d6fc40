//! Checkpointed, resumable running-minimum scans of the steadiness
//! functions, estimating σ₀ over a finite slice of the Collatz tree.
//!
//! The fast path accumulates each candidate in the log₂ domain and
//! recomputes the exact rational only when the candidate could beat the
//! current minimum; all accepted minima are exact. Ties are broken by
//! the smaller argument, which makes the merge of per-range partial
//! results associative and commutative, so a partitioned parallel scan
//! is bit-identical to a sequential one.

use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::levels::{generate_levels, LevelSet};
use crate::orbit::{stream_stats, trajectory, StreamStats};
use crate::ratio::ExactRatio;
use crate::steadiness::{sigma_literal, sigma_telescoping, SigmaMode};
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// Log-domain slack below which a candidate is confirmed exactly. The
/// streaming log₂ is accurate to ≪ 2⁻⁴⁰, so this margin never rejects
/// a true minimum.
const EXACT_CONFIRM_MARGIN: f64 = 1e-9;

/// Chunk width for partitioned integer-range scans.
const CHUNK: u64 = 8192;

/// Which steadiness functions a scan tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Literal,
    Telescoping,
    Both,
}

impl ScanMode {
    pub fn tracks(self, mode: SigmaMode) -> bool {
        match (self, mode) {
            (ScanMode::Both, _) => true,
            (ScanMode::Literal, SigmaMode::Literal) => true,
            (ScanMode::Telescoping, SigmaMode::Telescoping) => true,
            _ => false,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScanMode::Literal => "literal",
            ScanMode::Telescoping => "telescoping",
            ScanMode::Both => "both",
        }
    }
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ScanMode::Literal),
            "telescoping" => Ok(ScanMode::Telescoping),
            "both" => Ok(ScanMode::Both),
            other => Err(Error::InvalidInput(format!("unknown scan mode {other:?}"))),
        }
    }
}

/// What a scan ranges over: an integer interval tested for tree
/// membership, or the elements of levels L₀ … L_N (tree members by
/// construction).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScanDomain {
    Integers {
        #[serde(with = "crate::ratio::biguint_decimal")]
        lo: BigUint,
        #[serde(with = "crate::ratio::biguint_decimal")]
        hi: BigUint,
    },
    Levels { nu_max: u32 },
}

impl ScanDomain {
    pub fn integers(lo: u64, hi: u64) -> Self {
        ScanDomain::Integers {
            lo: BigUint::from(lo),
            hi: BigUint::from(hi),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ScanDomain::Integers { lo, hi } => {
                if lo.is_zero() {
                    return Err(Error::InvalidInput("scan domain must start at n >= 1".into()));
                }
                if lo > hi {
                    return Err(Error::EmptyDomain);
                }
                Ok(())
            }
            ScanDomain::Levels { .. } => Ok(()),
        }
    }
}

/// Progress cursor: the last fully processed input (integer mode) or
/// level index (level mode).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cursor {
    Integer {
        #[serde(with = "crate::ratio::biguint_decimal")]
        last: BigUint,
    },
    Level { last: u32 },
}

/// An exact running minimum with its labeled log₂ approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinEntry {
    pub value: ExactRatio,
    pub log2_approx: f64,
    #[serde(with = "crate::ratio::biguint_decimal")]
    pub argmin: BigUint,
}

impl MinEntry {
    /// Smaller value wins; ties go to the smaller argmin.
    fn better_than(&self, other: &MinEntry) -> bool {
        match self.value.cmp(&other.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.argmin < other.argmin,
            std::cmp::Ordering::Greater => false,
        }
    }
}

/// Resumable state of a σ₀ scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub format_version: u32,
    pub domain: ScanDomain,
    pub mode: ScanMode,
    pub cap: u64,
    pub cursor: Cursor,
    pub processed_count: u64,
    /// Inputs whose orbit did not reach 1 within the cap, excluded from
    /// the minima. Ascending.
    #[serde(with = "crate::ratio::biguint_decimal_vec")]
    pub skipped_cap_exceeded: Vec<BigUint>,
    pub min_literal: Option<MinEntry>,
    pub min_telescoping: Option<MinEntry>,
}

impl ScanCheckpoint {
    pub fn is_complete(&self) -> bool {
        match (&self.domain, &self.cursor) {
            (ScanDomain::Integers { hi, .. }, Cursor::Integer { last }) => last == hi,
            (ScanDomain::Levels { nu_max }, Cursor::Level { last }) => last == nu_max,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        self.domain.validate().map_err(|e| Error::Checkpoint(e.to_string()))?;
        match (&self.domain, &self.cursor) {
            (ScanDomain::Integers { lo, hi }, Cursor::Integer { last }) => {
                if last < lo || last > hi {
                    return Err(Error::Checkpoint(format!(
                        "cursor {last} outside domain [{lo}, {hi}]"
                    )));
                }
            }
            (ScanDomain::Levels { nu_max }, Cursor::Level { last }) => {
                if last > nu_max {
                    return Err(Error::Checkpoint(format!(
                        "cursor level {last} beyond nu_max {nu_max}"
                    )));
                }
            }
            _ => {
                return Err(Error::Checkpoint(
                    "cursor kind does not match domain kind".into(),
                ))
            }
        }
        if self.mode.tracks(SigmaMode::Literal) != self.min_literal.is_some()
            && self.processed_count > 0
        {
            return Err(Error::Checkpoint("literal minimum missing".into()));
        }
        Ok(())
    }
}

/// Per-range accumulation state.
#[derive(Debug, Clone, Default)]
struct MinState {
    literal: Option<MinEntry>,
    telescoping: Option<MinEntry>,
    skipped: Vec<BigUint>,
    processed: u64,
}

impl MinState {
    fn from_checkpoint(cp: &ScanCheckpoint) -> Self {
        MinState {
            literal: cp.min_literal.clone(),
            telescoping: cp.min_telescoping.clone(),
            skipped: cp.skipped_cap_exceeded.clone(),
            processed: cp.processed_count,
        }
    }

    /// Feeds one input. Exact confirmation runs only when the log-domain
    /// candidate is within [`EXACT_CONFIRM_MARGIN`] of beating the
    /// current minimum.
    fn consider(&mut self, n: &BigUint, cap: u64, mode: ScanMode) -> Result<()> {
        let stats = match stream_stats(n, cap) {
            Ok(s) => s,
            Err(Error::OrbitCapExceeded { n, .. }) => {
                self.skipped.push(n);
                self.processed += 1;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.processed += 1;
        let mut record: Option<crate::orbit::OrbitRecord> = None;
        for sigma_mode in [SigmaMode::Literal, SigmaMode::Telescoping] {
            if !mode.tracks(sigma_mode) {
                continue;
            }
            let (slot, cand_log2) = match sigma_mode {
                SigmaMode::Literal => (&mut self.literal, stats.literal_log2),
                SigmaMode::Telescoping => (&mut self.telescoping, stats.telescoping_log2),
            };
            let candidate = match slot {
                Some(cur) => cand_log2 < cur.log2_approx + EXACT_CONFIRM_MARGIN,
                None => true,
            };
            if !candidate {
                continue;
            }
            if record.is_none() {
                record = Some(trajectory(n, cap)?);
            }
            let rec = record.as_ref().unwrap();
            let exact = match sigma_mode {
                SigmaMode::Literal => sigma_literal(rec),
                SigmaMode::Telescoping => sigma_telescoping(rec),
            };
            let entry = MinEntry {
                value: exact.exact,
                log2_approx: cand_log2,
                argmin: n.clone(),
            };
            match slot {
                Some(cur) if !entry.better_than(cur) => {}
                _ => *slot = Some(entry),
            }
        }
        Ok(())
    }

    fn absorb(&mut self, other: MinState) {
        for (mine, theirs) in [
            (&mut self.literal, other.literal),
            (&mut self.telescoping, other.telescoping),
        ] {
            if let Some(entry) = theirs {
                match mine {
                    Some(cur) if !entry.better_than(cur) => {}
                    _ => *mine = Some(entry),
                }
            }
        }
        self.skipped.extend(other.skipped);
        self.processed += other.processed;
    }
}

fn range_values(lo: &BigUint, hi: &BigUint) -> impl Iterator<Item = BigUint> {
    let mut cur = lo.clone();
    let hi = hi.clone();
    let mut done = false;
    std::iter::from_fn(move || {
        if done || cur > hi {
            return None;
        }
        let out = cur.clone();
        if cur == hi {
            done = true;
        } else {
            cur += 1u32;
        }
        Some(out)
    })
}

fn scan_range(lo: &BigUint, hi: &BigUint, mode: ScanMode, cap: u64) -> Result<MinState> {
    let mut state = MinState::default();
    for n in range_values(lo, hi) {
        state.consider(&n, cap, mode)?;
    }
    Ok(state)
}

/// Splits [lo, hi] into ascending chunks of at most [`CHUNK`] values.
fn chunk_ranges(lo: &BigUint, hi: &BigUint) -> Vec<(BigUint, BigUint)> {
    let mut out = Vec::new();
    let mut start = lo.clone();
    let width = BigUint::from(CHUNK - 1);
    loop {
        let tentative = &start + &width;
        let end = if tentative >= *hi { hi.clone() } else { tentative };
        out.push((start.clone(), end.clone()));
        if end == *hi {
            break;
        }
        start = end + 1u32;
    }
    out
}

/// Runs (or resumes) a running-minimum scan.
///
/// `workers = 1` is the sequential reference; any other worker count
/// must produce a bit-identical checkpoint, which holds because chunk
/// results are merged with exact comparisons and a deterministic
/// tie-break.
pub fn scan_min_sigma(
    domain: &ScanDomain,
    mode: ScanMode,
    cap: u64,
    checkpoint_in: Option<&ScanCheckpoint>,
    workers: usize,
) -> Result<ScanCheckpoint> {
    domain.validate()?;
    if cap == 0 {
        return Err(Error::InvalidInput("cap must be >= 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidInput("workers must be >= 1".into()));
    }

    let mut state = MinState::default();
    let resume_cursor = match checkpoint_in {
        Some(cp) => {
            cp.validate()?;
            if cp.domain != *domain {
                return Err(Error::Checkpoint(
                    "checkpoint domain does not match requested domain".into(),
                ));
            }
            if cp.mode != mode {
                return Err(Error::Checkpoint(
                    "checkpoint mode does not match requested mode".into(),
                ));
            }
            if cp.cap != cap {
                return Err(Error::Checkpoint(
                    "checkpoint cap does not match requested cap".into(),
                ));
            }
            if cp.is_complete() {
                return Ok(cp.clone());
            }
            state = MinState::from_checkpoint(cp);
            Some(cp.cursor.clone())
        }
        None => None,
    };

    match domain {
        ScanDomain::Integers { lo, hi } => {
            let start = match resume_cursor {
                Some(Cursor::Integer { last }) => &last + 1u32,
                Some(Cursor::Level { .. }) => unreachable!("validated above"),
                None => lo.clone(),
            };
            let chunks = chunk_ranges(&start, hi);
            let partials: Vec<Result<MinState>> = if workers == 1 {
                chunks
                    .iter()
                    .map(|(a, b)| scan_range(a, b, mode, cap))
                    .collect()
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
                pool.install(|| {
                    chunks
                        .par_iter()
                        .map(|(a, b)| scan_range(a, b, mode, cap))
                        .collect()
                })
            };
            for partial in partials {
                state.absorb(partial?);
            }
            Ok(finish(domain, mode, cap, Cursor::Integer { last: hi.clone() }, state))
        }
        ScanDomain::Levels { nu_max } => {
            let first_level = match resume_cursor {
                Some(Cursor::Level { last }) => last + 1,
                Some(Cursor::Integer { .. }) => unreachable!("validated above"),
                None => 0,
            };
            let mut failure = None;
            generate_levels(*nu_max, |level: &LevelSet| {
                if level.nu < first_level || failure.is_some() {
                    return Ok(());
                }
                let partials: Vec<Result<MinState>> = level
                    .elements
                    .par_chunks(CHUNK as usize)
                    .map(|chunk| {
                        let mut local = MinState::default();
                        for n in chunk {
                            local.consider(n, cap, mode)?;
                        }
                        Ok(local)
                    })
                    .collect();
                for partial in partials {
                    match partial {
                        Ok(p) => state.absorb(p),
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                }
                Ok(())
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(finish(domain, mode, cap, Cursor::Level { last: *nu_max }, state))
        }
    }
}

fn finish(
    domain: &ScanDomain,
    mode: ScanMode,
    cap: u64,
    cursor: Cursor,
    mut state: MinState,
) -> ScanCheckpoint {
    state.skipped.sort();
    ScanCheckpoint {
        format_version: CHECKPOINT_FORMAT_VERSION,
        domain: domain.clone(),
        mode,
        cap,
        cursor,
        processed_count: state.processed,
        skipped_cap_exceeded: state.skipped,
        min_literal: state.literal,
        min_telescoping: state.telescoping,
    }
}

/// Merges two fully processed checkpoints over adjacent integer ranges.
/// The minima combine by the associative smaller-value rule with ties
/// to the smaller argmin, so any merge order over a partition yields
/// the single-pass result.
pub fn merge_checkpoints(a: &ScanCheckpoint, b: &ScanCheckpoint) -> Result<ScanCheckpoint> {
    a.validate()?;
    b.validate()?;
    if a.mode != b.mode || a.cap != b.cap {
        return Err(Error::Checkpoint(
            "cannot merge checkpoints with different modes or caps".into(),
        ));
    }
    if !a.is_complete() || !b.is_complete() {
        return Err(Error::Checkpoint(
            "cannot merge partially processed checkpoints".into(),
        ));
    }
    let (a_lo, a_hi, b_lo, b_hi) = match (&a.domain, &b.domain) {
        (
            ScanDomain::Integers { lo: al, hi: ah },
            ScanDomain::Integers { lo: bl, hi: bh },
        ) => (al, ah, bl, bh),
        _ => {
            return Err(Error::Checkpoint(
                "only integer-range checkpoints can be merged".into(),
            ))
        }
    };
    // Order the two ranges and require adjacency so the union is again
    // a range.
    let (first, second) = if a_hi < b_lo {
        (a, b)
    } else if b_hi < a_lo {
        (b, a)
    } else {
        return Err(Error::Checkpoint("checkpoint domains overlap".into()));
    };
    let (f_lo, f_hi, s_lo, s_hi) = match (&first.domain, &second.domain) {
        (
            ScanDomain::Integers { lo: fl, hi: fh },
            ScanDomain::Integers { lo: sl, hi: sh },
        ) => (fl.clone(), fh.clone(), sl.clone(), sh.clone()),
        _ => unreachable!(),
    };
    if &f_hi + 1u32 != s_lo {
        return Err(Error::Checkpoint(
            "checkpoint domains are not adjacent".into(),
        ));
    }
    let mut state = MinState::from_checkpoint(first);
    state.absorb(MinState::from_checkpoint(second));
    let domain = ScanDomain::Integers {
        lo: f_lo,
        hi: s_hi.clone(),
    };
    Ok(finish(
        &domain,
        a.mode,
        a.cap,
        Cursor::Integer { last: s_hi },
        state,
    ))
}

/// Extracts the streaming statistics for one value; exposed for the
/// stream-vs-record agreement tests and the CLI.
pub fn stats_of(n: &BigUint, cap: u64) -> Result<StreamStats> {
    stream_stats(n, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn r(n: u64, d: u64) -> ExactRatio {
        ExactRatio::from_u64s(n, d).unwrap()
    }

    #[test]
    fn single_value_domain() {
        let cp = scan_min_sigma(&ScanDomain::integers(1, 1), ScanMode::Literal, 100, None, 1)
            .unwrap();
        let min = cp.min_literal.unwrap();
        assert_eq!(min.value, r(3, 4));
        assert_eq!(min.argmin.to_u64(), Some(1));
        assert!(cp.min_telescoping.is_none());
        assert_eq!(cp.processed_count, 1);
    }

    #[test]
    fn one_to_ten_matches_oracle() {
        let cp = scan_min_sigma(
            &ScanDomain::integers(1, 10),
            ScanMode::Both,
            1000,
            None,
            1,
        )
        .unwrap();
        let lit = cp.min_literal.unwrap();
        assert_eq!(lit.argmin.to_u64(), Some(9));
        assert_eq!(lit.value, r(177_147, 327_680));
        assert!(cp.min_telescoping.is_some());
    }

    #[test]
    fn empty_and_invalid_domains() {
        let lo_gt_hi = ScanDomain::integers(5, 4);
        assert!(matches!(
            scan_min_sigma(&lo_gt_hi, ScanMode::Literal, 100, None, 1),
            Err(Error::EmptyDomain)
        ));
        let zero = ScanDomain::integers(0, 4);
        assert!(scan_min_sigma(&zero, ScanMode::Literal, 100, None, 1).is_err());
    }

    #[test]
    fn cap_exceeded_inputs_are_skipped_not_fatal() {
        // cap 5 forces everything except powers of two (and tiny n) out.
        let cp = scan_min_sigma(&ScanDomain::integers(1, 40), ScanMode::Literal, 5, None, 1)
            .unwrap();
        assert!(!cp.skipped_cap_exceeded.is_empty());
        assert_eq!(cp.processed_count, 40);
        assert!(cp.skipped_cap_exceeded.windows(2).all(|w| w[0] < w[1]));
        assert!(cp
            .skipped_cap_exceeded
            .iter()
            .any(|n| n.to_u64() == Some(27)));
        // The minimum only covers survivors.
        assert!(cp.min_literal.is_some());
    }

    #[test]
    fn parallel_scan_is_bit_identical() {
        let domain = ScanDomain::integers(1, 20_000);
        let seq = scan_min_sigma(&domain, ScanMode::Both, 10_000, None, 1).unwrap();
        let par = scan_min_sigma(&domain, ScanMode::Both, 10_000, None, 4).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn level_domain_scan() {
        let cp = scan_min_sigma(
            &ScanDomain::Levels { nu_max: 20 },
            ScanMode::Both,
            100_000,
            None,
            2,
        )
        .unwrap();
        // Every element of L_0..L_20 (sum of the level cardinalities).
        assert_eq!(cp.processed_count, 342);
        assert!(cp.skipped_cap_exceeded.is_empty());
        let lit = cp.min_literal.unwrap();
        assert!(lit.value < r(3, 4));
        let tel = cp.min_telescoping.unwrap();
        assert!(lit.value <= tel.value);
    }

    #[test]
    fn resume_equals_one_shot() {
        let domain = ScanDomain::integers(1, 3000);
        let full = scan_min_sigma(&domain, ScanMode::Both, 10_000, None, 1).unwrap();

        // Fake an interruption at n = 1500: scan the prefix, then widen
        // the recorded domain to the full range with the cursor parked.
        let partial = {
            let prefix = scan_min_sigma(
                &ScanDomain::integers(1, 1500),
                ScanMode::Both,
                10_000,
                None,
                1,
            )
            .unwrap();
            ScanCheckpoint {
                domain: domain.clone(),
                cursor: Cursor::Integer {
                    last: BigUint::from(1500u32),
                },
                ..prefix
            }
        };
        let resumed = scan_min_sigma(&domain, ScanMode::Both, 10_000, Some(&partial), 1).unwrap();
        assert_eq!(resumed, full);
    }

    #[test]
    fn resume_validation_errors() {
        let domain = ScanDomain::integers(1, 100);
        let cp = scan_min_sigma(&domain, ScanMode::Literal, 1000, None, 1).unwrap();
        let other = ScanDomain::integers(1, 200);
        assert!(matches!(
            scan_min_sigma(&other, ScanMode::Literal, 1000, Some(&cp), 1),
            Err(Error::Checkpoint(_))
        ));
        assert!(matches!(
            scan_min_sigma(&domain, ScanMode::Both, 1000, Some(&cp), 1),
            Err(Error::Checkpoint(_))
        ));
        assert!(matches!(
            scan_min_sigma(&domain, ScanMode::Literal, 999, Some(&cp), 1),
            Err(Error::Checkpoint(_))
        ));
        let mut bad = cp.clone();
        bad.format_version = 99;
        assert!(matches!(
            scan_min_sigma(&domain, ScanMode::Literal, 1000, Some(&bad), 1),
            Err(Error::Checkpoint(_))
        ));
    }

    #[test]
    fn merge_matches_single_pass() {
        let whole = scan_min_sigma(
            &ScanDomain::integers(1, 4000),
            ScanMode::Both,
            10_000,
            None,
            1,
        )
        .unwrap();
        let a = scan_min_sigma(
            &ScanDomain::integers(1, 1234),
            ScanMode::Both,
            10_000,
            None,
            1,
        )
        .unwrap();
        let b = scan_min_sigma(
            &ScanDomain::integers(1235, 4000),
            ScanMode::Both,
            10_000,
            None,
            1,
        )
        .unwrap();
        let merged = merge_checkpoints(&b, &a).unwrap();
        assert_eq!(merged, whole);
    }

    #[test]
    fn merge_rejects_gaps_and_overlap() {
        let a = scan_min_sigma(&ScanDomain::integers(1, 10), ScanMode::Both, 100, None, 1)
            .unwrap();
        let gap = scan_min_sigma(&ScanDomain::integers(12, 20), ScanMode::Both, 100, None, 1)
            .unwrap();
        assert!(merge_checkpoints(&a, &gap).is_err());
        let overlap =
            scan_min_sigma(&ScanDomain::integers(5, 20), ScanMode::Both, 100, None, 1).unwrap();
        assert!(merge_checkpoints(&a, &overlap).is_err());
    }

    #[test]
    fn tie_break_prefers_smaller_argmin() {
        // 1 and 2 both have literal steadiness 3/4.
        let cp = scan_min_sigma(&ScanDomain::integers(1, 2), ScanMode::Literal, 100, None, 1)
            .unwrap();
        let min = cp.min_literal.unwrap();
        assert_eq!(min.value, r(3, 4));
        assert_eq!(min.argmin.to_u64(), Some(1));

        // The same tie decided across a merge boundary.
        let a = scan_min_sigma(&ScanDomain::integers(1, 1), ScanMode::Literal, 100, None, 1)
            .unwrap();
        let b = scan_min_sigma(&ScanDomain::integers(2, 2), ScanMode::Literal, 100, None, 1)
            .unwrap();
        let merged = merge_checkpoints(&b, &a).unwrap();
        assert_eq!(merged.min_literal.unwrap().argmin.to_u64(), Some(1));
    }
}
