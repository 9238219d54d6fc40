//! The Collatz function, forward trajectories to 1, and parity
//! bookkeeping.
//!
//! Two entry points cover the two workloads: [`trajectory`] materializes
//! the full step sequence (needed for exact steadiness products and
//! orbit sets), while [`stream_stats`] walks the same orbit without
//! storing it, producing (ν, κ) and log-domain running products for
//! large scans. The two must agree and are tested against each other.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Default iteration cap. Vastly above any known stopping time for
/// desk-scale inputs, so hitting it signals a possible non-tree member
/// rather than a hang.
pub const DEFAULT_CAP: u64 = 100_000;

/// One application of the Collatz function: n/2 for even n, 3n+1 for odd.
pub fn collatz_step(n: &BigUint) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::InvalidInput("collatz_step requires n >= 1".into()));
    }
    if n.bit(0) {
        Ok(n * 3u32 + 1u32)
    } else {
        Ok(n >> 1)
    }
}

/// A forward trajectory c⁰(n), c¹(n), …, c^ν(n) = 1 together with its
/// parity bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    /// Start value, ≥ 1.
    pub n: BigUint,
    /// The full step sequence; `steps[0] = n`, `steps[nu] = 1`.
    pub steps: Vec<BigUint>,
    /// First index with c^ν(n) = 1, i.e. the level of n.
    pub nu: u64,
    /// Count of odd values among `steps[0..nu]` (tripling steps).
    pub kappa: u64,
    /// The images c^i(n) of the odd steps, in trajectory order. Each is
    /// ≡ 4 (mod 6).
    pub odd_images: Vec<BigUint>,
}

impl OrbitRecord {
    /// The orbit set R(n) = {c^i(n) : i ≥ 0}. For tree members this is
    /// the trajectory plus the trivial cycle {1, 4, 2}.
    pub fn orbit_set(&self) -> BTreeSet<BigUint> {
        let mut set: BTreeSet<BigUint> = self.steps.iter().cloned().collect();
        set.insert(BigUint::one());
        set.insert(BigUint::from(2u32));
        set.insert(BigUint::from(4u32));
        set
    }
}

/// Free-function form of [`OrbitRecord::orbit_set`].
pub fn orbit_set_of(rec: &OrbitRecord) -> BTreeSet<BigUint> {
    rec.orbit_set()
}

/// Iterates the Collatz function from `n` until 1, recording every step.
///
/// Errors with [`Error::OrbitCapExceeded`] if 1 is not reached within
/// `cap` steps.
pub fn trajectory(n: &BigUint, cap: u64) -> Result<OrbitRecord> {
    if n.is_zero() {
        return Err(Error::InvalidInput("trajectory requires n >= 1".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidInput("cap must be >= 1".into()));
    }
    let mut steps = vec![n.clone()];
    let mut kappa = 0u64;
    let mut odd_images = Vec::new();
    while !steps.last().unwrap().is_one() {
        if steps.len() as u64 > cap {
            return Err(Error::OrbitCapExceeded {
                n: n.clone(),
                cap,
            });
        }
        let cur = steps.last().unwrap();
        let odd = cur.bit(0);
        let next = collatz_step(cur)?;
        if odd {
            kappa += 1;
            odd_images.push(next.clone());
        }
        steps.push(next);
    }
    let nu = (steps.len() - 1) as u64;
    Ok(OrbitRecord {
        n: n.clone(),
        steps,
        nu,
        kappa,
        odd_images,
    })
}

/// Compensated (Kahan) accumulator for the log-domain products.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// log₂((k−1)/k) = ln(1 − 1/k)/ln 2 for k ≥ 2, full f64 accuracy.
pub(crate) fn log2_term_u128(k: u128) -> f64 {
    debug_assert!(k >= 2);
    (-1.0 / k as f64).ln_1p() / std::f64::consts::LN_2
}

pub(crate) fn log2_term_biguint(k: &BigUint) -> f64 {
    match k.to_u128() {
        Some(v) => log2_term_u128(v),
        // k beyond u128: 1/k underflows any observable contribution.
        None => (-k.to_f64().unwrap().recip()).ln_1p() / std::f64::consts::LN_2,
    }
}

/// Streaming orbit statistics: (ν, κ) plus the two steadiness products
/// accumulated in the log₂ domain, without materializing the steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    pub n: BigUint,
    pub nu: u64,
    pub kappa: u64,
    /// log₂ of the literal steadiness: factors (k−1)/k over the orbit
    /// set elements k ≡ 4 (mod 6), each counted once.
    pub literal_log2: f64,
    /// log₂ of the telescoping steadiness: factors over the odd-step
    /// images only.
    pub telescoping_log2: f64,
}

/// Walks the orbit of `n` in u128 arithmetic where possible, falling
/// back to big integers on overflow.
///
/// The literal factor set is the orbit set filtered to k ≡ 4 (mod 6).
/// Steps before 1 are pairwise distinct, so deduplication reduces to
/// tracking whether the cycle element 4 was visited; if not (n ∈ {1, 2})
/// its factor 3/4 is appended for the cycle closure.
pub fn stream_stats(n: &BigUint, cap: u64) -> Result<StreamStats> {
    if n.is_zero() {
        return Err(Error::InvalidInput("stream_stats requires n >= 1".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidInput("cap must be >= 1".into()));
    }
    let mut nu = 0u64;
    let mut kappa = 0u64;
    let mut literal = Kahan::default();
    let mut telescoping = Kahan::default();
    let mut saw_four = false;

    let mut observe = |k_small: Option<u128>, k_big: Option<&BigUint>, after_odd: bool| {
        let (qualifies, term) = match k_small {
            Some(k) => (k % 6 == 4, if k % 6 == 4 { log2_term_u128(k) } else { 0.0 }),
            None => {
                let k = k_big.unwrap();
                let q = (k % 6u32).to_u8() == Some(4);
                (q, if q { log2_term_biguint(k) } else { 0.0 })
            }
        };
        if qualifies {
            literal.add(term);
            if after_odd {
                telescoping.add(term);
            }
            if k_small == Some(4) {
                saw_four = true;
            }
        }
    };

    // Initial value is part of the orbit set.
    match n.to_u128() {
        Some(v) => observe(Some(v), None, false),
        None => observe(None, Some(n), false),
    }

    let mut small = n.to_u128();
    let mut big: Option<BigUint> = if small.is_some() { None } else { Some(n.clone()) };

    loop {
        let done = match (&small, &big) {
            (Some(1), _) => true,
            (None, Some(b)) => b.is_one(),
            _ => false,
        };
        if done {
            break;
        }
        if nu >= cap {
            return Err(Error::OrbitCapExceeded {
                n: n.clone(),
                cap,
            });
        }
        let was_odd;
        match small {
            Some(v) => {
                was_odd = v & 1 == 1;
                if was_odd {
                    match v.checked_mul(3).and_then(|x| x.checked_add(1)) {
                        Some(next) => small = Some(next),
                        None => {
                            big = Some(BigUint::from(v) * 3u32 + 1u32);
                            small = None;
                        }
                    }
                } else {
                    small = Some(v >> 1);
                }
            }
            None => {
                let b = big.as_ref().unwrap();
                was_odd = b.bit(0);
                let next = if was_odd { b * 3u32 + 1u32 } else { b >> 1 };
                match next.to_u128() {
                    Some(v) => {
                        small = Some(v);
                        big = None;
                    }
                    None => big = Some(next),
                }
            }
        }
        nu += 1;
        if was_odd {
            kappa += 1;
        }
        observe(small, big.as_ref(), was_odd);
    }

    if !saw_four {
        // Cycle closure contributes k = 4 exactly once.
        literal.add(log2_term_u128(4));
    }

    Ok(StreamStats {
        n: n.clone(),
        nu,
        kappa,
        literal_log2: literal.value(),
        telescoping_log2: telescoping.value(),
    })
}
