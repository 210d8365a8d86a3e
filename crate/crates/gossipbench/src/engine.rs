//! Discrete-event core.
//!
//! Events are totally ordered by `(time, insertion sequence)`; the sequence
//! tie-break makes simultaneous events deterministic, so a run is a pure
//! function of `(graph, seed, config)`.
//!
//! Every node runs an independent Poisson clock: timer intervals are
//! exponential with a configurable mean (1 s by default). At t=0 the
//! originator is informed and every node schedules its first tick at an
//! exponential offset; the loop then alternates between timer fires (which
//! emit protocol messages) and message arrivals (delayed by the network
//! model) until a termination condition is met.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, GroupAssignment};
use crate::metrics::RunMetrics;
use crate::net::{LinkParams, LinkTable};
use crate::policy::{init_policy_state, Policy, PolicyError};
use crate::protocol::{
    fanout_count, FanoutConfig, MessageKind, NodeRuntime, ProtocolMessage, RemovedReplies,
};
use crate::stopping::{StoppingConfig, StoppingError, StoppingRuntime};
use crate::{NodeId, SimTime};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{0}")]
    Param(String),
    #[error("event scheduled in the past: t={at} < now={now}")]
    SchedulePast { now: SimTime, at: SimTime },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Stopping(#[from] StoppingError),
    #[error("trace write failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Poisson clock configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockConfig {
    /// Mean timer interval in seconds.
    pub mean_interval: SimTime,
}

impl Default for ClockConfig {
    fn default() -> Self {
        ClockConfig { mean_interval: 1.0 }
    }
}

/// Strictly positive exponential variate with mean `cfg.mean_interval`.
pub fn exp_sample<R: Rng>(rng: &mut R, cfg: &ClockConfig) -> SimTime {
    loop {
        let u: f64 = rng.gen(); // [0, 1)
        if u > 0.0 {
            return -cfg.mean_interval * u.ln();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    TimerFire(NodeId),
    MessageArrival(ProtocolMessage),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: SimTime,
    pub seq: u64,
    pub kind: EventKind,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want earliest first.
        other
            .time
            .total_cmp(&self.time)
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Priority queue over `(time, seq)` with a monotonic clock.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<SimEvent>,
    next_seq: u64,
    now: SimTime,
}

impl EventQueue {
    pub fn new() -> Self {
        EventQueue::default()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Enqueues an event; scheduling before the current time is a contract
    /// violation.
    pub fn schedule(&mut self, time: SimTime, kind: EventKind) -> Result<(), EngineError> {
        if time < self.now {
            return Err(EngineError::SchedulePast {
                now: self.now,
                at: time,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(SimEvent { time, seq, kind });
        Ok(())
    }

    /// Pops the earliest event and advances the clock to it.
    pub fn pop(&mut self) -> Option<SimEvent> {
        let ev = self.heap.pop()?;
        debug_assert!(ev.time >= self.now);
        self.now = ev.time;
        Some(ev)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Stop as soon as every node is informed (no-stopping experiments).
    UntilAllInformed,
    /// Run until the event queue drains (stopping-criteria experiments,
    /// where sub-100% final percentages are legitimate outcomes).
    UntilQuiescent,
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "until_all_informed" => Ok(RunMode::UntilAllInformed),
            "until_quiescent" => Ok(RunMode::UntilQuiescent),
            other => Err(format!("unknown run mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    AllInformed,
    Quiescent,
    TimeLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::AllInformed => "all_informed",
            Termination::Quiescent => "quiescent",
            Termination::TimeLimit => "time_limit",
        }
    }
}

/// Everything a single run needs beyond the graph and the link table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub clock: ClockConfig,
    pub run_mode: RunMode,
    /// Safety limit on simulated time, in seconds.
    pub max_sim_time: SimTime,
    pub originator: NodeId,
    pub policy: Policy,
    pub memory: usize,
    pub stopping: StoppingConfig,
    pub fanout: FanoutConfig,
    pub removed_replies: RemovedReplies,
    pub link_params: LinkParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            clock: ClockConfig::default(),
            run_mode: RunMode::UntilAllInformed,
            max_sim_time: 1e5,
            originator: 0,
            policy: Policy::Random,
            memory: 0,
            stopping: StoppingConfig::default(),
            fanout: FanoutConfig::default(),
            removed_replies: RemovedReplies::Empty,
            link_params: LinkParams::default(),
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub termination: Termination,
}

/// Executes one simulation run.
///
/// RNG draw order is fixed: policy state per node (ascending id), then the
/// first timer per node (ascending id), then event-loop draws in event
/// order. Replaying with the same seed reproduces the event sequence, the
/// metrics and the trace byte for byte.
///
/// `trace`, when given, receives one line per processed event:
/// `time<TAB>kind<TAB>src<TAB>dst<TAB>msgtype` with kind `timer` or
/// `arrival` (timer lines carry the node as both src and dst and `-` as
/// msgtype).
pub fn run_simulation<R: Rng>(
    g: &Graph,
    links: &LinkTable,
    cfg: &RunConfig,
    groups: Option<&GroupAssignment>,
    rng: &mut R,
    mut trace: Option<&mut dyn Write>,
) -> Result<RunOutcome, EngineError> {
    let n = g.node_count();
    if n == 0 {
        return Err(EngineError::Param("graph has no nodes".into()));
    }
    if cfg.originator as usize >= n {
        return Err(EngineError::Param(format!(
            "originator {} out of range for {n} nodes",
            cfg.originator
        )));
    }
    if links.node_count() != n {
        return Err(EngineError::Param(format!(
            "link table covers {} nodes, graph has {n}",
            links.node_count()
        )));
    }
    if !(cfg.clock.mean_interval > 0.0) {
        return Err(EngineError::Param(format!(
            "clock mean must be positive, got {}",
            cfg.clock.mean_interval
        )));
    }
    let sr = StoppingRuntime::resolve(&cfg.stopping, n)?;
    let degrees = g.out_degrees();

    let mut nodes: Vec<NodeRuntime> = Vec::with_capacity(n);
    for v in 0..n as NodeId {
        let ps = init_policy_state(g.out_neighbors(v), cfg.policy, cfg.memory, &degrees, rng)?;
        nodes.push(NodeRuntime::new(ps));
    }
    let fanouts: Vec<u32> = (0..n as NodeId)
        .map(|v| fanout_count(v, &cfg.fanout, groups, degrees[v as usize]))
        .collect();

    let mut metrics = RunMetrics::new(n);
    nodes[cfg.originator as usize].inform(0.0, &sr);
    metrics.record_inform(cfg.originator, 0.0);
    let mut informed = 1usize;

    let mut queue = EventQueue::new();
    for v in 0..n as NodeId {
        let at = exp_sample(rng, &cfg.clock);
        queue
            .schedule(at, EventKind::TimerFire(v))
            .expect("first timers start from t=0");
    }

    let mut end_time: SimTime = 0.0;
    let termination = loop {
        if cfg.run_mode == RunMode::UntilAllInformed && informed == n {
            break Termination::AllInformed;
        }
        let Some(ev) = queue.pop() else {
            break Termination::Quiescent;
        };
        if ev.time > cfg.max_sim_time {
            end_time = cfg.max_sim_time;
            break Termination::TimeLimit;
        }
        end_time = ev.time;

        match ev.kind {
            EventKind::TimerFire(v) => {
                if let Some(w) = trace.as_deref_mut() {
                    writeln!(w, "{:.9}\ttimer\t{v}\t{v}\t-", ev.time)?;
                }
                let out = nodes[v as usize].on_timer(v, g.out_neighbors(v), fanouts[v as usize], &sr, rng);
                metrics.record_tick(v, !out.messages.is_empty());
                for msg in out.messages {
                    metrics.record_send(&msg, ev.time);
                    let delay = links.message_delay(msg.src, msg.dst, msg.size_bytes());
                    queue
                        .schedule(ev.time + delay, EventKind::MessageArrival(msg))
                        .expect("message delays are strictly positive");
                }
                if out.reschedule {
                    let at = ev.time + exp_sample(rng, &cfg.clock);
                    queue
                        .schedule(at, EventKind::TimerFire(v))
                        .expect("timer intervals are strictly positive");
                }
            }
            EventKind::MessageArrival(msg) => {
                if let Some(w) = trace.as_deref_mut() {
                    writeln!(
                        w,
                        "{:.9}\tarrival\t{}\t{}\t{}",
                        ev.time,
                        msg.src,
                        msg.dst,
                        msg.type_tag()
                    )?;
                }
                let node = &mut nodes[msg.dst as usize];
                match msg.kind {
                    MessageKind::Push => {
                        if node.on_push(&msg, ev.time, &sr) {
                            informed += 1;
                            metrics.record_inform(msg.dst, ev.time);
                        }
                    }
                    MessageKind::PullRequest => {
                        let reply = node.on_pull_request(&msg, cfg.removed_replies);
                        metrics.record_send(&reply, ev.time);
                        let delay = links.message_delay(reply.src, reply.dst, reply.size_bytes());
                        queue
                            .schedule(ev.time + delay, EventKind::MessageArrival(reply))
                            .expect("message delays are strictly positive");
                    }
                    MessageKind::PullReply => {
                        if node.on_pull_reply(&msg, ev.time, &sr) {
                            informed += 1;
                            metrics.record_inform(msg.dst, ev.time);
                        }
                    }
                }
            }
        }
    };

    metrics.finish(end_time);
    Ok(RunOutcome {
        metrics,
        termination,
    })
}
