//! Deterministic discrete-event simulation of asynchronous push & pull
//! rumour spreading on social graphs.
//!
//! The crate bundles everything needed to run repeatable rumour-spreading
//! experiments on real edge-list datasets or synthetic preferential-attachment
//! graphs:
//!
//! * [`graph`] — dataset parsing (directed / undirected / signed edge lists),
//!   largest-connected-component extraction, degree-based popularity groups,
//!   structural statistics and a preferential-attachment generator.
//! * [`net`] — star-topology network model with per-node access-link latency
//!   and bandwidth.
//! * [`engine`] — the event queue, exponential clocks and the single-run
//!   simulation loop.
//! * [`protocol`] — the push & pull node state machine and fan-out rules.
//! * [`policy`] — neighbor-selection strategies (uniform random with optional
//!   memory, and the quasirandom list-cycling family).
//! * [`stopping`] — tick budgets and the asynchronous median-counter
//!   termination algorithm.
//! * [`metrics`] — time-to-fraction and network-load measurements.
//! * [`experiment`] — replication orchestration, deterministic seeding and
//!   CSV emission.
//! * [`cli`] — the `stats` / `run` / `sweep` command fronts used by the
//!   `gossipbench` binary.
//!
//! Every run is fully determined by `(graph, seed, config)`; replications use
//! independent seeds derived from a base seed, so whole experiments reproduce
//! byte-identically.
//!
//! See the crate examples for runnable walkthroughs of each capability:
//!
//! ```bash
//! cargo run --release -p gossipbench --example baseline_run
//! ```

pub mod cli;
pub mod engine;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod net;
pub mod policy;
pub mod protocol;
pub mod stopping;

pub use engine::{run_simulation, ClockConfig, RunConfig, RunMode, RunOutcome, Termination};
pub use experiment::ExperimentConfig;
pub use graph::{Graph, GraphKind, GroupAssignment, SignPolicy};
pub use net::{LinkParams, LinkTable, MessageSize};
pub use policy::Policy;
pub use protocol::{FanoutConfig, FanoutMode};
pub use stopping::{Criterion, StoppingConfig};

/// Dense node index within a graph; datasets are remapped to `[0, n)`.
pub type NodeId = u32;

/// Simulation timestamps and durations, in seconds.
pub type SimTime = f64;

/// Ceil that forgives float noise just above an integer: log and product
/// arithmetic can land at `k + 1e-15` when the exact value is `k`, and a
/// plain ceil would overshoot by one.
pub(crate) fn ceil_guarded(x: f64) -> f64 {
    (x - 1e-9).ceil()
}
