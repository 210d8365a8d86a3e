//! The asynchronous push & pull node state machine.
//!
//! Node states:
//!
//! * `Uninformed`: does not know the rumour; its ticks send pull requests.
//! * `Informed`: knows the rumour; its ticks push it to selected contacts.
//! * `Removed`: informed but stopped by a stopping criterion; answers pulls
//!   with an empty reply by default (it refrains from spreading).
//! * `Dormant`: uninformed with its tick budget spent; sends nothing, but
//!   still becomes `Informed` (timer-less) when the rumour reaches it.
//!
//! Handlers mutate only the node they belong to and return the messages to
//! send; scheduling and delivery belong to the engine.

use rand::Rng;

use crate::graph::{Group, GroupAssignment};
use crate::net::MessageSize;
use crate::policy::{select_targets, PolicyState};
use crate::stopping::{Criterion, McAnnotation, McDecision, McState, StoppingRuntime};
use crate::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeState {
    Uninformed,
    Informed,
    Removed,
    Dormant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Push,
    PullRequest,
    PullReply,
}

/// A protocol message in flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolMessage {
    pub kind: MessageKind,
    pub src: NodeId,
    pub dst: NodeId,
    pub carries_rumour: bool,
    /// Median-counter annotation; rides rumour-bearing messages only.
    pub mc: Option<McAnnotation>,
}

impl ProtocolMessage {
    pub fn size_bytes(&self) -> u64 {
        match (self.kind, self.carries_rumour) {
            (MessageKind::Push, _) => MessageSize::PUSH,
            (MessageKind::PullRequest, _) => MessageSize::PULL_REQUEST,
            (MessageKind::PullReply, true) => MessageSize::PULL_REPLY_RUMOUR,
            (MessageKind::PullReply, false) => MessageSize::PULL_REPLY_EMPTY,
        }
    }

    /// Stable tag used in event traces.
    pub fn type_tag(&self) -> &'static str {
        match (self.kind, self.carries_rumour) {
            (MessageKind::Push, _) => "push",
            (MessageKind::PullRequest, _) => "pull_request",
            (MessageKind::PullReply, true) => "pull_reply_rumour",
            (MessageKind::PullReply, false) => "pull_reply_empty",
        }
    }
}

/// How many contacts a node addresses per tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FanoutMode {
    Absolute,
    Relative,
    /// Relative for the giant-component core and the one-degree fringe,
    /// absolute (`hybrid_middle_abs`) for the middle region.
    Hybrid,
}

impl FanoutMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FanoutMode::Absolute => "absolute",
            FanoutMode::Relative => "relative",
            FanoutMode::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for FanoutMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(FanoutMode::Absolute),
            "relative" => Ok(FanoutMode::Relative),
            "hybrid" => Ok(FanoutMode::Hybrid),
            other => Err(format!("unknown fanout mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoutConfig {
    pub mode: FanoutMode,
    pub f_abs: u32,
    /// Fraction of the neighbor list, in [0, 1].
    pub f_rel: f64,
    pub hybrid_middle_abs: u32,
}

impl Default for FanoutConfig {
    /// One contact per tick: the plain push & pull protocol.
    fn default() -> Self {
        FanoutConfig {
            mode: FanoutMode::Absolute,
            f_abs: 1,
            f_rel: 0.04,
            hybrid_middle_abs: 2,
        }
    }
}

impl FanoutConfig {
    pub fn absolute(f_abs: u32) -> Self {
        FanoutConfig {
            mode: FanoutMode::Absolute,
            f_abs,
            ..FanoutConfig::default()
        }
    }

    pub fn relative(f_rel: f64) -> Self {
        FanoutConfig {
            mode: FanoutMode::Relative,
            f_rel,
            ..FanoutConfig::default()
        }
    }

    pub fn hybrid(f_rel: f64, hybrid_middle_abs: u32) -> Self {
        FanoutConfig {
            mode: FanoutMode::Hybrid,
            f_rel,
            hybrid_middle_abs,
            ..FanoutConfig::default()
        }
    }

    /// Value rendered into result rows: the knob that varies per mode.
    pub fn value_string(&self) -> String {
        match self.mode {
            FanoutMode::Absolute => self.f_abs.to_string(),
            FanoutMode::Relative => format!("{}", self.f_rel),
            FanoutMode::Hybrid => format!("{}+{}", self.f_rel, self.hybrid_middle_abs),
        }
    }
}

/// Contacts addressed per tick by `node`, never exceeding its degree and
/// never below one for a connected node.
///
/// Absolute: `min(f_abs, d)`. Relative: `min(d, max(1, floor(f_rel * d)))`.
/// Hybrid: relative everywhere except the middle popularity group, which
/// uses the absolute rule with `hybrid_middle_abs`.
pub fn fanout_count(
    node: NodeId,
    cfg: &FanoutConfig,
    groups: Option<&GroupAssignment>,
    out_degree: u32,
) -> u32 {
    if out_degree == 0 {
        return 0;
    }
    // Floor with noise forgiveness: products like 0.29 * 100 land at
    // 28.999999999999996 and must floor to 29, not 28.
    let relative = |f_rel: f64| {
        let floor = (f_rel * out_degree as f64 + 1e-9).floor() as u32;
        out_degree.min(floor.max(1))
    };
    match cfg.mode {
        FanoutMode::Absolute => cfg.f_abs.min(out_degree),
        FanoutMode::Relative => relative(cfg.f_rel),
        FanoutMode::Hybrid => {
            debug_assert!(groups.is_some(), "hybrid fan-out needs a group assignment");
            match groups.map(|g| g.group(node)) {
                Some(Group::Middle) => cfg.hybrid_middle_abs.min(out_degree),
                _ => relative(cfg.f_rel),
            }
        }
    }
}

/// Whether removed nodes still answer pulls with the rumour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemovedReplies {
    #[default]
    Empty,
    Rumour,
}

impl std::str::FromStr for RemovedReplies {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "empty" => Ok(RemovedReplies::Empty),
            "rumour" => Ok(RemovedReplies::Rumour),
            other => Err(format!("unknown removed-replies mode `{other}`")),
        }
    }
}

/// Result of one timer tick.
#[derive(Debug)]
pub struct TimerOutcome {
    pub messages: Vec<ProtocolMessage>,
    /// False once the node stopped; the engine then drops its timer chain.
    pub reschedule: bool,
}

/// Per-node protocol state for one run.
#[derive(Debug, Clone)]
pub struct NodeRuntime {
    state: NodeState,
    first_informed_at: Option<SimTime>,
    tick_count: u64,
    policy: PolicyState,
    mc: Option<McState>,
}

impl NodeRuntime {
    pub fn new(policy: PolicyState) -> Self {
        NodeRuntime {
            state: NodeState::Uninformed,
            first_informed_at: None,
            tick_count: 0,
            policy,
            mc: None,
        }
    }

    pub fn state(&self) -> NodeState {
        self.state
    }

    pub fn first_informed_at(&self) -> Option<SimTime> {
        self.first_informed_at
    }

    pub fn tick_count(&self) -> u64 {
        self.tick_count
    }

    pub fn is_informed(&self) -> bool {
        matches!(self.state, NodeState::Informed | NodeState::Removed)
            || self.first_informed_at.is_some()
    }

    /// Marks the node informed (used for the originator at t=0 and by the
    /// message handlers). A Dormant node turns Informed but its budget stays
    /// spent, so it never regains a timer. Never rescinds Removed.
    pub fn inform(&mut self, now: SimTime, sr: &StoppingRuntime) {
        debug_assert!(matches!(
            self.state,
            NodeState::Uninformed | NodeState::Dormant
        ));
        self.state = NodeState::Informed;
        self.first_informed_at = Some(now);
        if sr.cfg.criterion == Criterion::MedianCounter {
            self.mc = Some(McState::new_informed(&sr.cfg, sr.n));
        }
    }

    fn stop(&mut self) {
        self.state = match self.state {
            NodeState::Informed => NodeState::Removed,
            NodeState::Uninformed => NodeState::Dormant,
            s => s,
        };
    }

    /// Budget already spent before this tick (a stale timer on an exhausted
    /// node only performs the transition).
    fn exhausted(&self, sr: &StoppingRuntime) -> bool {
        match sr.cfg.criterion {
            Criterion::None => false,
            Criterion::MedianCounter => self.tick_count >= sr.safety_cap.unwrap(),
            _ => self.tick_count >= sr.budget.unwrap(),
        }
    }

    /// Handles one timer tick: sends to the selected contacts (push when
    /// informed, pull when not), counts the tick, then consults the stopping
    /// criterion, which may retire the node.
    pub fn on_timer<R: Rng>(
        &mut self,
        node: NodeId,
        neighbors: &[NodeId],
        fanout: u32,
        sr: &StoppingRuntime,
        rng: &mut R,
    ) -> TimerOutcome {
        debug_assert!(matches!(
            self.state,
            NodeState::Uninformed | NodeState::Informed
        ));
        if self.exhausted(sr) {
            self.stop();
            return TimerOutcome {
                messages: Vec::new(),
                reschedule: false,
            };
        }

        let mut messages = Vec::new();
        if fanout >= 1 && !neighbors.is_empty() {
            let targets = select_targets(&mut self.policy, neighbors, fanout as usize, rng);
            for dst in targets {
                messages.push(match self.state {
                    NodeState::Informed => ProtocolMessage {
                        kind: MessageKind::Push,
                        src: node,
                        dst,
                        carries_rumour: true,
                        mc: self.mc.as_ref().map(McState::annotation),
                    },
                    NodeState::Uninformed => ProtocolMessage {
                        kind: MessageKind::PullRequest,
                        src: node,
                        dst,
                        carries_rumour: false,
                        mc: None,
                    },
                    _ => unreachable!(),
                });
            }
        }
        self.tick_count += 1;

        let stop = match sr.cfg.criterion {
            Criterion::None => false,
            Criterion::MedianCounter => {
                // The interval since the previous tick is this node's local
                // round; close it after target selection.
                let mc_stop = match self.mc.as_mut() {
                    Some(mc) => mc.tick(&sr.cfg, sr.n) == McDecision::Stop,
                    None => false,
                };
                mc_stop || self.tick_count >= sr.safety_cap.unwrap()
            }
            _ => self.tick_count >= sr.budget.unwrap(),
        };
        if stop {
            self.stop();
        }
        TimerOutcome {
            messages,
            reschedule: !stop,
        }
    }

    /// Handles an arriving push. Returns true when the node was informed by
    /// this message.
    pub fn on_push(&mut self, msg: &ProtocolMessage, now: SimTime, sr: &StoppingRuntime) -> bool {
        debug_assert_eq!(msg.kind, MessageKind::Push);
        let newly = matches!(self.state, NodeState::Uninformed | NodeState::Dormant);
        if newly {
            self.inform(now, sr);
        }
        self.observe_annotation(msg);
        newly
    }

    /// Handles an arriving pull request; always produces a reply.
    pub fn on_pull_request(
        &self,
        msg: &ProtocolMessage,
        removed_replies: RemovedReplies,
    ) -> ProtocolMessage {
        debug_assert_eq!(msg.kind, MessageKind::PullRequest);
        let carries_rumour = match self.state {
            NodeState::Informed => true,
            NodeState::Removed => removed_replies == RemovedReplies::Rumour,
            NodeState::Uninformed | NodeState::Dormant => false,
        };
        ProtocolMessage {
            kind: MessageKind::PullReply,
            src: msg.dst,
            dst: msg.src,
            carries_rumour,
            mc: if carries_rumour {
                self.mc.as_ref().map(McState::annotation)
            } else {
                None
            },
        }
    }

    /// Handles an arriving pull reply. Returns true when the node was
    /// informed by this message.
    pub fn on_pull_reply(
        &mut self,
        msg: &ProtocolMessage,
        now: SimTime,
        sr: &StoppingRuntime,
    ) -> bool {
        debug_assert_eq!(msg.kind, MessageKind::PullReply);
        if !msg.carries_rumour {
            return false;
        }
        let newly = matches!(self.state, NodeState::Uninformed | NodeState::Dormant);
        if newly {
            self.inform(now, sr);
        }
        self.observe_annotation(msg);
        newly
    }

    fn observe_annotation(&mut self, msg: &ProtocolMessage) {
        debug_assert!(msg.mc.is_none() || msg.carries_rumour);
        if let (Some(mc), Some(a)) = (self.mc.as_mut(), msg.mc) {
            mc.observe(a);
        }
    }
}
