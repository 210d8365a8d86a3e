//! Neighbor-selection policies.
//!
//! `Random` draws targets uniformly without replacement, optionally skipping
//! the last `m` contacted neighbors (neighbor memory). The quasirandom
//! family walks a fixed ordering of the neighbor list cyclically from a
//! random starting position:
//!
//! * `Q`   adjacency order (ascending node id),
//! * `QP`  most popular first (out-degree descending),
//! * `QU`  least popular first (out-degree ascending),
//! * `QPU` most popular, then least, then second most, second least, ...
//! * `QUP` least popular, then most, then second least, second most, ...
//!
//! Popularity is out-degree; popularity ties break by ascending node id.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::NodeId;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("neighbor memory requires the random policy (got {0})")]
    MemoryWithQuasirandom(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Random,
    Q,
    Qp,
    Qu,
    Qpu,
    Qup,
}

impl Policy {
    pub fn is_quasirandom(self) -> bool {
        self != Policy::Random
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Random => "random",
            Policy::Q => "q",
            Policy::Qp => "qp",
            Policy::Qu => "qu",
            Policy::Qpu => "qpu",
            Policy::Qup => "qup",
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Policy::Random),
            "q" => Ok(Policy::Q),
            "qp" => Ok(Policy::Qp),
            "qu" => Ok(Policy::Qu),
            "qpu" => Ok(Policy::Qpu),
            "qup" => Ok(Policy::Qup),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// Per-node selection state for one run.
#[derive(Debug, Clone)]
pub struct PolicyState {
    policy: Policy,
    memory_size: usize,
    /// FIFO of recently contacted neighbors, oldest first.
    memory: Vec<NodeId>,
    /// Quasirandom only: fixed permutation of the out-neighbors.
    ordered_list: Vec<NodeId>,
    cursor: usize,
}

impl PolicyState {
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn ordered_list(&self) -> &[NodeId] {
        &self.ordered_list
    }

    pub fn memory(&self) -> &[NodeId] {
        &self.memory
    }
}

/// Builds the fixed contact order for a quasirandom policy.
///
/// `out_degrees` indexes the popularity of every node in the graph.
pub fn order_neighbors(neighbors: &[NodeId], policy: Policy, out_degrees: &[u32]) -> Vec<NodeId> {
    let mut list: Vec<NodeId> = neighbors.to_vec();
    match policy {
        Policy::Random => list,
        Policy::Q => {
            // Adjacency order; adjacency lists are already ascending by id.
            list
        }
        Policy::Qp => {
            sort_by_popularity(&mut list, out_degrees, true);
            list
        }
        Policy::Qu => {
            sort_by_popularity(&mut list, out_degrees, false);
            list
        }
        Policy::Qpu => {
            sort_by_popularity(&mut list, out_degrees, true);
            interleave_front_back(&list)
        }
        Policy::Qup => {
            sort_by_popularity(&mut list, out_degrees, false);
            interleave_front_back(&list)
        }
    }
}

fn sort_by_popularity(list: &mut [NodeId], out_degrees: &[u32], descending: bool) {
    list.sort_by(|&a, &b| {
        let (da, db) = (out_degrees[a as usize], out_degrees[b as usize]);
        let ord = if descending { db.cmp(&da) } else { da.cmp(&db) };
        ord.then(a.cmp(&b))
    });
}

/// Positions front, back, front+1, back-1, ... of `list`.
fn interleave_front_back(list: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(list.len());
    let (mut lo, mut hi) = (0usize, list.len());
    while lo < hi {
        out.push(list[lo]);
        lo += 1;
        if lo < hi {
            hi -= 1;
            out.push(list[hi]);
        }
    }
    out
}

/// Initializes per-node policy state.
///
/// Quasirandom policies consume one RNG draw for the starting cursor even
/// for degree-1 nodes, keeping the RNG schedule independent of topology.
pub fn init_policy_state<R: Rng>(
    neighbors: &[NodeId],
    policy: Policy,
    memory_size: usize,
    out_degrees: &[u32],
    rng: &mut R,
) -> Result<PolicyState, PolicyError> {
    if policy.is_quasirandom() && memory_size > 0 {
        return Err(PolicyError::MemoryWithQuasirandom(policy.as_str()));
    }
    let (ordered_list, cursor) = if policy.is_quasirandom() {
        let list = order_neighbors(neighbors, policy, out_degrees);
        let cursor = rng.gen_range(0..list.len().max(1));
        (list, cursor)
    } else {
        (Vec::new(), 0)
    };
    Ok(PolicyState {
        policy,
        memory_size,
        memory: Vec::new(),
        ordered_list,
        cursor,
    })
}

/// Picks `f` distinct contact targets and advances the policy state.
///
/// Requires `1 <= f <= out_degree`. Quasirandom: the next `f` list entries
/// cyclically from the cursor. Random: `f` uniform draws without
/// replacement, excluding the most recent `min(m, out_degree - f)` memory
/// entries so low-degree nodes are never deadlocked.
pub fn select_targets<R: Rng>(
    ps: &mut PolicyState,
    neighbors: &[NodeId],
    f: usize,
    rng: &mut R,
) -> Vec<NodeId> {
    let d = neighbors.len();
    debug_assert!(f >= 1 && f <= d);

    if ps.policy.is_quasirandom() {
        let mut out = Vec::with_capacity(f);
        for k in 0..f {
            out.push(ps.ordered_list[(ps.cursor + k) % d]);
        }
        ps.cursor = (ps.cursor + f) % d;
        return out;
    }

    let exclude_len = ps.memory_size.min(d - f).min(ps.memory.len());
    let excluded = &ps.memory[ps.memory.len() - exclude_len..];
    let pool: Vec<NodeId> = neighbors
        .iter()
        .copied()
        .filter(|v| !excluded.contains(v))
        .collect();
    let out: Vec<NodeId> = pool.choose_multiple(rng, f).copied().collect();

    if ps.memory_size > 0 {
        ps.memory.extend_from_slice(&out);
        let overflow = ps.memory.len().saturating_sub(ps.memory_size);
        if overflow > 0 {
            ps.memory.drain(..overflow);
        }
    }
    out
}
