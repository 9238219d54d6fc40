//! Cluster detection on level sets: by κ-group and by gap threshold.
//!
//! The two definitions coincide on small ν but neither is privileged;
//! [`compare_partitions`] cross-validates them. The κ view reports
//! (rather than assumes) contiguity: if two κ-groups ever interleave in
//! value order the partition is still returned, with `interleaved` set,
//! since interleaving is exactly the "clusters dissolve" event of
//! interest.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::levels::{kappas_of, LevelSet};
use crate::ratio::ExactRatio;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ClusterMethod {
    ByKappa,
    ByGap { factor: ExactRatio },
}

/// A partition of a level set into ascending, contiguous, non-empty
/// blocks whose concatenation is the level set in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub nu: u32,
    pub method: ClusterMethod,
    #[serde(with = "crate::ratio::biguint_decimal_vec_vec")]
    pub clusters: Vec<Vec<BigUint>>,
    /// Only meaningful for the κ method: true iff some κ value occurs
    /// in more than one run of the sorted level set.
    pub interleaved: bool,
}

impl ClusterPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }
}

/// Groups elements by κ(n), computed per element from its trajectory.
/// Blocks follow element order, which for non-interleaved levels means
/// descending κ.
pub fn clusters_by_kappa(level: &LevelSet) -> Result<ClusterPartition> {
    level.validate()?;
    let kappas = kappas_of(level)?;
    let mut clusters: Vec<Vec<BigUint>> = Vec::new();
    let mut run_kappas: Vec<u64> = Vec::new();
    for (n, kappa) in level.elements.iter().zip(&kappas) {
        if run_kappas.last() == Some(kappa) {
            clusters.last_mut().unwrap().push(n.clone());
        } else {
            run_kappas.push(*kappa);
            clusters.push(vec![n.clone()]);
        }
    }
    let distinct = {
        let mut ks = run_kappas.clone();
        ks.sort_unstable();
        ks.dedup();
        ks.len()
    };
    Ok(ClusterPartition {
        nu: level.nu,
        method: ClusterMethod::ByKappa,
        clusters,
        interleaved: run_kappas.len() != distinct,
    })
}

/// Starts a new cluster at element e whenever e > factor · previous,
/// compared exactly.
pub fn clusters_by_gap(level: &LevelSet, factor: &ExactRatio) -> Result<ClusterPartition> {
    if *factor <= ExactRatio::one() {
        return Err(Error::InvalidInput(format!(
            "gap factor must exceed 1, got {factor}"
        )));
    }
    level.validate()?;
    let mut clusters: Vec<Vec<BigUint>> = Vec::new();
    for n in &level.elements {
        let breaks = match clusters.last().and_then(|c| c.last()) {
            // e > factor · prev ⟺ e · den > num · prev
            Some(prev) => n * factor.den() > prev * factor.num(),
            None => true,
        };
        if breaks {
            clusters.push(vec![n.clone()]);
        } else {
            clusters.last_mut().unwrap().push(n.clone());
        }
    }
    Ok(ClusterPartition {
        nu: level.nu,
        method: ClusterMethod::ByGap {
            factor: factor.clone(),
        },
        clusters,
        interleaved: false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionComparison {
    pub equal: bool,
    /// Index of the first differing block, when not equal.
    pub first_difference: Option<usize>,
}

/// Block-boundary comparison of two partitions of the same level set.
pub fn compare_partitions(
    a: &ClusterPartition,
    b: &ClusterPartition,
) -> Result<PartitionComparison> {
    if a.nu != b.nu {
        return Err(Error::InvalidInput(format!(
            "partitions cover different levels: {} vs {}",
            a.nu, b.nu
        )));
    }
    let flat_a: Vec<&BigUint> = a.clusters.iter().flatten().collect();
    let flat_b: Vec<&BigUint> = b.clusters.iter().flatten().collect();
    if flat_a != flat_b {
        return Err(Error::InvalidInput(
            "partitions cover different element sets".into(),
        ));
    }
    for (i, (ca, cb)) in a.clusters.iter().zip(&b.clusters).enumerate() {
        if ca != cb {
            return Ok(PartitionComparison {
                equal: false,
                first_difference: Some(i),
            });
        }
    }
    if a.clusters.len() != b.clusters.len() {
        let shared = a.clusters.len().min(b.clusters.len());
        return Ok(PartitionComparison {
            equal: false,
            first_difference: Some(shared),
        });
    }
    Ok(PartitionComparison {
        equal: true,
        first_difference: None,
    })
}
