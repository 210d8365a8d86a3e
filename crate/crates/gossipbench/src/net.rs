//! Star network model.
//!
//! Every node hangs off a central switch through its own uplink with a fixed
//! latency and bandwidth drawn once per run. A message from `src` to `dst`
//! crosses both uplinks, so its delay is
//!
//! ```text
//! delay = latency(src) + latency(dst) + total_bits / min(bw(src), bw(dst))
//! ```
//!
//! The bottleneck-bandwidth term models store-and-forward through the hub
//! without simulating queueing. Delays are strictly positive and symmetric
//! in the endpoints for a fixed message size.

use rand::Rng;

use crate::{NodeId, SimTime};

/// Bounds for per-node link parameters, sampled uniformly per run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Uplink latency range in seconds.
    pub latency_min_s: f64,
    pub latency_max_s: f64,
    /// Uplink bandwidth range in bits per second.
    pub bandwidth_min_bps: f64,
    pub bandwidth_max_bps: f64,
}

impl Default for LinkParams {
    /// 10..100 ms latency, 3..50 Mbit/s bandwidth.
    fn default() -> Self {
        LinkParams {
            latency_min_s: 0.010,
            latency_max_s: 0.100,
            bandwidth_min_bps: 3.0e6,
            bandwidth_max_bps: 50.0e6,
        }
    }
}

/// Per-node sampled link parameters for one run.
#[derive(Debug, Clone)]
pub struct LinkTable {
    latency_s: Vec<f64>,
    bandwidth_bps: Vec<f64>,
}

impl LinkTable {
    /// Samples one latency and one bandwidth per node.
    ///
    /// Draw order is fixed (latency then bandwidth, node 0 upward) so a
    /// seeded RNG reproduces the same table.
    pub fn assign<R: Rng>(n: usize, params: &LinkParams, rng: &mut R) -> Self {
        let mut latency_s = Vec::with_capacity(n);
        let mut bandwidth_bps = Vec::with_capacity(n);
        for _ in 0..n {
            latency_s.push(rng.gen_range(params.latency_min_s..params.latency_max_s));
            bandwidth_bps.push(rng.gen_range(params.bandwidth_min_bps..params.bandwidth_max_bps));
        }
        LinkTable {
            latency_s,
            bandwidth_bps,
        }
    }

    pub fn node_count(&self) -> usize {
        self.latency_s.len()
    }

    pub fn latency_s(&self, v: NodeId) -> f64 {
        self.latency_s[v as usize]
    }

    pub fn bandwidth_bps(&self, v: NodeId) -> f64 {
        self.bandwidth_bps[v as usize]
    }

    /// End-to-end delay for `total_bytes` sent from `src` to `dst`.
    pub fn message_delay(&self, src: NodeId, dst: NodeId, total_bytes: u64) -> SimTime {
        let bottleneck = self.bandwidth_bps(src).min(self.bandwidth_bps(dst));
        self.latency_s(src) + self.latency_s(dst) + (total_bytes * 8) as f64 / bottleneck
    }
}

/// On-wire message sizes in bytes.
///
/// Every message carries a 20-byte header; messages that carry the rumour
/// add an 8-byte payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageSize;

impl MessageSize {
    pub const HEADER_BYTES: u64 = 20;
    pub const RUMOUR_BYTES: u64 = 8;

    pub const PUSH: u64 = Self::HEADER_BYTES + Self::RUMOUR_BYTES;
    pub const PULL_REQUEST: u64 = Self::HEADER_BYTES;
    pub const PULL_REPLY_RUMOUR: u64 = Self::HEADER_BYTES + Self::RUMOUR_BYTES;
    pub const PULL_REPLY_EMPTY: u64 = Self::HEADER_BYTES;
}
