//! Run measurements: time to inform a fraction of the graph, network load,
//! and the improvement arithmetic used when comparing protocol variants.
//!
//! Messages are counted at send time, so `network_load` at a target equals
//! the number of messages the protocol had generated by the moment that
//! fraction of nodes was informed, divided by that moment.

use thiserror::Error;

use crate::protocol::{MessageKind, ProtocolMessage};
use crate::{ceil_guarded, NodeId, SimTime};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("baseline must be positive, got {0}")]
    NonPositiveBaseline(f64),
}

/// Message totals by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MessageCounts {
    pub push: u64,
    pub pull_request: u64,
    pub pull_reply_rumour: u64,
    pub pull_reply_empty: u64,
}

impl MessageCounts {
    pub fn total(&self) -> u64 {
        self.push + self.pull_request + self.pull_reply_rumour + self.pull_reply_empty
    }
}

/// Everything measured during a single run.
#[derive(Debug, Clone)]
pub struct RunMetrics {
    n: usize,
    first_informed_at: Vec<Option<SimTime>>,
    /// Timestamp of the k-th distinct inform, k = 1.. (index 0 = originator).
    informs_in_order: Vec<SimTime>,
    counts: MessageCounts,
    /// One entry per sent message, non-decreasing (sends happen in event
    /// order).
    send_times: Vec<SimTime>,
    end_time: SimTime,
    ticks_fired: Vec<u64>,
    /// Ticks on which the node sent at least one protocol-initiated message.
    ticks_initiated: Vec<u64>,
}

impl RunMetrics {
    pub fn new(n: usize) -> Self {
        RunMetrics {
            n,
            first_informed_at: vec![None; n],
            informs_in_order: Vec::new(),
            counts: MessageCounts::default(),
            send_times: Vec::new(),
            end_time: 0.0,
            ticks_fired: vec![0; n],
            ticks_initiated: vec![0; n],
        }
    }

    pub(crate) fn record_inform(&mut self, v: NodeId, t: SimTime) {
        debug_assert!(self.first_informed_at[v as usize].is_none());
        self.first_informed_at[v as usize] = Some(t);
        debug_assert!(self.informs_in_order.last().map_or(true, |&p| p <= t));
        self.informs_in_order.push(t);
    }

    pub(crate) fn record_send(&mut self, msg: &ProtocolMessage, t: SimTime) {
        match (msg.kind, msg.carries_rumour) {
            (MessageKind::Push, _) => self.counts.push += 1,
            (MessageKind::PullRequest, _) => self.counts.pull_request += 1,
            (MessageKind::PullReply, true) => self.counts.pull_reply_rumour += 1,
            (MessageKind::PullReply, false) => self.counts.pull_reply_empty += 1,
        }
        debug_assert!(self.send_times.last().map_or(true, |&p| p <= t));
        self.send_times.push(t);
    }

    pub(crate) fn record_tick(&mut self, v: NodeId, initiated: bool) {
        self.ticks_fired[v as usize] += 1;
        if initiated {
            self.ticks_initiated[v as usize] += 1;
        }
    }

    pub(crate) fn finish(&mut self, end_time: SimTime) {
        self.end_time = end_time;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn informed_count(&self) -> usize {
        self.informs_in_order.len()
    }

    /// Fraction of nodes informed by the end of the run, in [0, 1].
    pub fn final_informed_fraction(&self) -> f64 {
        self.informed_count() as f64 / self.n as f64
    }

    pub fn first_informed_at(&self, v: NodeId) -> Option<SimTime> {
        self.first_informed_at[v as usize]
    }

    pub fn end_time(&self) -> SimTime {
        self.end_time
    }

    pub fn message_counts(&self) -> MessageCounts {
        self.counts
    }

    pub fn total_messages(&self) -> u64 {
        self.counts.total()
    }

    /// Cumulative messages sent at or before `t`.
    pub fn messages_by(&self, t: SimTime) -> u64 {
        self.send_times.partition_point(|&s| s <= t) as u64
    }

    pub fn ticks_fired(&self, v: NodeId) -> u64 {
        self.ticks_fired[v as usize]
    }

    pub fn ticks_initiated(&self, v: NodeId) -> u64 {
        self.ticks_initiated[v as usize]
    }

    /// Time at which the ceil(pct * n)-th node became informed, or None if
    /// the run never got that far. `pct` in (0, 1].
    pub fn time_to_fraction(&self, pct: f64) -> Option<SimTime> {
        debug_assert!(pct > 0.0 && pct <= 1.0);
        let k = (ceil_guarded(pct * self.n as f64) as usize).max(1);
        self.informs_in_order.get(k - 1).copied()
    }

    /// Messages generated per second up to the moment `pct` of the nodes
    /// were informed. None when the fraction was not reached or was reached
    /// instantaneously (a single-node graph).
    pub fn network_load(&self, pct: f64) -> Option<f64> {
        let t = self.time_to_fraction(pct)?;
        if t <= 0.0 {
            return None;
        }
        Some(self.messages_by(t) as f64 / t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Reduction,
    Increase,
}

/// Percentage change of `variant` against `baseline`.
///
/// Reduction: `(baseline - variant) / baseline * 100`. Increase:
/// `(variant - baseline) / baseline * 100`.
pub fn improvement_pct(
    baseline: f64,
    variant: f64,
    direction: Direction,
) -> Result<f64, MetricsError> {
    if baseline <= 0.0 {
        return Err(MetricsError::NonPositiveBaseline(baseline));
    }
    Ok(match direction {
        Direction::Reduction => (baseline - variant) / baseline * 100.0,
        Direction::Increase => (variant - baseline) / baseline * 100.0,
    })
}

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation; 0 for fewer than two values.
pub fn stddev_pop(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}
