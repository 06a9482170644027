use serde::{Deserialize, Serialize};

use super::{CommunityError, CommunityId, Partition, Topology};

/// Per-community modularity terms.
///
/// `sigma_in` is the sum of adjacency entries over ordered member pairs
/// (twice the internal edge count) and `sigma_tot` the summed member degree,
/// which makes `sum_{i,j in c} k_i k_j / 2m = sigma_tot^2 / 2m` hold exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityScore {
    pub community: CommunityId,
    pub sigma_in: u64,
    pub sigma_tot: u64,
    /// `sigma_in - sigma_tot^2 / 2m`.
    pub q: f64,
}

fn check(topology: &Topology, partition: &Partition) -> Result<(), CommunityError> {
    if partition.len() != topology.node_count() {
        return Err(CommunityError::PartitionMismatch {
            nodes: topology.node_count(),
            assigned: partition.len(),
        });
    }
    if topology.edge_count() == 0 {
        return Err(CommunityError::UndefinedModularity);
    }
    Ok(())
}

/// `(sigma_in, sigma_tot)` for every community, indexed by community id.
fn sums(topology: &Topology, partition: &Partition) -> Vec<(u64, u64)> {
    let mut out = vec![(0u64, 0u64); partition.community_count()];
    for &(a, b) in topology.edges() {
        let (ca, cb) = (partition.community_of(a), partition.community_of(b));
        out[ca].1 += 1;
        out[cb].1 += 1;
        if ca == cb {
            out[ca].0 += 2;
        }
    }
    out
}

fn score(community: CommunityId, sigma_in: u64, sigma_tot: u64, two_m: u64) -> CommunityScore {
    // Exact integer numerator, one rounding: communities that tie exactly
    // must compare equal so the utility and id tie-breaks apply.
    let num =
        i128::from(two_m) * i128::from(sigma_in) - i128::from(sigma_tot) * i128::from(sigma_tot);
    CommunityScore {
        community,
        sigma_in,
        sigma_tot,
        q: num as f64 / two_m as f64,
    }
}

/// Graph modularity computed community by community.
pub fn modularity(topology: &Topology, partition: &Partition) -> Result<f64, CommunityError> {
    Ok(community_scores(topology, partition)?
        .iter()
        .map(|s| s.q)
        .sum::<f64>()
        / (2.0 * topology.edge_count() as f64))
}

pub fn community_scores(
    topology: &Topology,
    partition: &Partition,
) -> Result<Vec<CommunityScore>, CommunityError> {
    check(topology, partition)?;
    let two_m = 2 * topology.edge_count() as u64;
    Ok(sums(topology, partition)
        .into_iter()
        .enumerate()
        .map(|(c, (si, st))| score(c, si, st, two_m))
        .collect())
}

pub fn community_modularity(
    topology: &Topology,
    partition: &Partition,
    community: CommunityId,
) -> Result<CommunityScore, CommunityError> {
    check(topology, partition)?;
    if community >= partition.community_count() {
        return Err(CommunityError::UnknownCommunity(community));
    }
    let (si, st) = sums(topology, partition)[community];
    Ok(score(community, si, st, 2 * topology.edge_count() as u64))
}
