//! Stopping criteria.
//!
//! Two families decide when a node ceases participating:
//!
//! * Analytic tick budgets derived from the LCC size `n`: a node stops after
//!   a fixed number of its own timer ticks.
//! * The median-counter algorithm, a distributed termination rule adapted to
//!   the asynchronous setting: the interval between a node's consecutive
//!   timer ticks acts as its local round, and counter annotations ride only
//!   rumour-bearing messages.
//!
//! Budgets use logarithm base 10 by default. With base 10 an originator on a
//! 63,392-node graph runs `ceil(n * log10 n)` = 304,411 push ticks, which is
//! how the default was chosen; the base is configurable because asymptotic
//! bounds hide it.

use thiserror::Error;

use crate::ceil_guarded;

#[derive(Debug, Error)]
pub enum StoppingError {
    #[error("{0} is not a tick-budget criterion")]
    NotABudget(&'static str),
    #[error("{0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// No stopping: nodes tick forever.
    None,
    /// ceil(log3 n + c_lnln * ln ln n) ticks.
    Log3PlusLnLn,
    /// ceil(c_log * log n) ticks.
    LogN,
    /// ceil(c_logsq * (log n)^2) ticks.
    LogSqN,
    /// ceil(c_nlogn * n * log n) ticks.
    NLogN,
    /// Distributed median-counter termination.
    MedianCounter,
}

impl Criterion {
    pub fn is_budget(self) -> bool {
        matches!(
            self,
            Criterion::Log3PlusLnLn | Criterion::LogN | Criterion::LogSqN | Criterion::NLogN
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::None => "none",
            Criterion::Log3PlusLnLn => "log3lnln",
            Criterion::LogN => "logn",
            Criterion::LogSqN => "log2n",
            Criterion::NLogN => "nlogn",
            Criterion::MedianCounter => "median",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Criterion::None),
            "log3lnln" => Ok(Criterion::Log3PlusLnLn),
            "logn" => Ok(Criterion::LogN),
            "log2n" => Ok(Criterion::LogSqN),
            "nlogn" => Ok(Criterion::NLogN),
            "median" => Ok(Criterion::MedianCounter),
            other => Err(format!("unknown stopping criterion `{other}`")),
        }
    }
}

/// Criterion plus its tunable constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingConfig {
    pub criterion: Criterion,
    /// Base of the logarithm in LogN/LogSqN/NLogN budgets.
    pub log_base: f64,
    /// Multiplier of the ln ln n term in Log3PlusLnLn.
    pub c_lnln: f64,
    pub c_log: f64,
    pub c_logsq: f64,
    pub c_nlogn: f64,
    /// Median counter: cap before a node turns C; 0 = derive from n.
    pub mc_ctr_max: u32,
    /// Median counter: C-phase countdown length; 0 = derive from n.
    pub mc_c_phase: u32,
    /// Median counter: safety-cap multiplier of ceil(log2 n) ticks.
    pub mc_safety: u32,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        StoppingConfig {
            criterion: Criterion::None,
            log_base: 10.0,
            c_lnln: 4.0,
            c_log: 1.0,
            c_logsq: 1.0,
            c_nlogn: 1.0,
            mc_ctr_max: 0,
            mc_c_phase: 0,
            mc_safety: 4,
        }
    }
}

impl StoppingConfig {
    pub fn with_criterion(criterion: Criterion) -> Self {
        StoppingConfig {
            criterion,
            ..StoppingConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), StoppingError> {
        if !(self.log_base > 1.0) {
            return Err(StoppingError::InvalidParam(format!(
                "log base must exceed 1, got {}",
                self.log_base
            )));
        }
        Ok(())
    }

    /// Counter cap: ceil(2 * log2 log2 n) + 1 unless overridden.
    pub fn ctr_max(&self, n: usize) -> u32 {
        if self.mc_ctr_max > 0 {
            self.mc_ctr_max
        } else {
            ceil_guarded(2.0 * (n as f64).log2().log2()).max(0.0) as u32 + 1
        }
    }

    /// C-phase countdown: ceil(2 * log2 log2 n) unless overridden.
    pub fn c_phase(&self, n: usize) -> u32 {
        if self.mc_c_phase > 0 {
            self.mc_c_phase
        } else {
            (ceil_guarded(2.0 * (n as f64).log2().log2()).max(1.0)) as u32
        }
    }

    /// Absolute tick cap for every node under MedianCounter.
    pub fn safety_cap(&self, n: usize) -> u64 {
        self.mc_safety as u64 * ceil_guarded((n as f64).log2()).max(1.0) as u64
    }
}

/// Number of ticks a node participates under a budget criterion.
///
/// All budgets clamp to at least 1 so every node acts on its first tick
/// (Log3PlusLnLn is negative for n=2 where ln ln n < 0).
pub fn tick_budget(cfg: &StoppingConfig, n: usize) -> Result<u64, StoppingError> {
    if n < 2 {
        return Err(StoppingError::InvalidParam(format!(
            "budget requires n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    let log = |x: f64| x.ln() / cfg.log_base.ln();
    let raw = match cfg.criterion {
        Criterion::Log3PlusLnLn => nf.ln() / 3f64.ln() + cfg.c_lnln * nf.ln().ln(),
        Criterion::LogN => cfg.c_log * log(nf),
        Criterion::LogSqN => cfg.c_logsq * log(nf) * log(nf),
        Criterion::NLogN => cfg.c_nlogn * nf * log(nf),
        Criterion::None => return Err(StoppingError::NotABudget("none")),
        Criterion::MedianCounter => return Err(StoppingError::NotABudget("median")),
    };
    Ok((ceil_guarded(raw) as i64).max(1) as u64)
}

/// Stopping parameters resolved against a concrete graph size, computed once
/// per run and shared by every node.
#[derive(Debug, Clone)]
pub struct StoppingRuntime {
    pub cfg: StoppingConfig,
    pub n: usize,
    /// Tick budget; set iff the criterion is a budget criterion.
    pub budget: Option<u64>,
    /// Absolute tick cap; set iff the criterion is MedianCounter.
    pub safety_cap: Option<u64>,
}

impl StoppingRuntime {
    pub fn resolve(cfg: &StoppingConfig, n: usize) -> Result<Self, StoppingError> {
        cfg.validate()?;
        let budget = if cfg.criterion.is_budget() {
            // Budgets are defined for n >= 2; a 1-node graph gets the
            // minimum budget of a single tick.
            Some(if n < 2 { 1 } else { tick_budget(cfg, n)? })
        } else {
            None
        };
        let safety_cap = (cfg.criterion == Criterion::MedianCounter).then(|| cfg.safety_cap(n));
        Ok(StoppingRuntime {
            cfg: *cfg,
            n,
            budget,
            safety_cap,
        })
    }
}

/// Median-counter phase. D is absorbing (the node has stopped).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum McPhase {
    B,
    C,
    D,
}

/// Annotation carried by rumour-bearing messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McAnnotation {
    pub phase: McPhase,
    pub counter: u32,
}

/// Tick decision: keep participating or stop for good.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McDecision {
    Continue,
    Stop,
}

/// Per-node median-counter state.
///
/// Uninformed nodes hold no counter; they are bounded only by the safety
/// cap, which the protocol layer enforces via tick counts.
#[derive(Debug, Clone)]
pub struct McState {
    phase: McPhase,
    counter: u32,
    c_countdown: u32,
    observations: Vec<McAnnotation>,
}

impl McState {
    /// State taken on at the moment a node becomes informed.
    pub fn new_informed(cfg: &StoppingConfig, n: usize) -> Self {
        McState {
            phase: McPhase::B,
            counter: 1,
            c_countdown: cfg.c_phase(n),
            observations: Vec::new(),
        }
    }

    pub fn phase(&self) -> McPhase {
        self.phase
    }

    pub fn counter(&self) -> u32 {
        self.counter
    }

    /// Current annotation to stamp onto outgoing rumour-bearing messages.
    pub fn annotation(&self) -> McAnnotation {
        McAnnotation {
            phase: self.phase,
            counter: self.counter,
        }
    }

    /// Records an annotation from an incoming rumour-bearing message.
    pub fn observe(&mut self, annotation: McAnnotation) {
        if self.phase == McPhase::D {
            return;
        }
        self.observations.push(annotation);
    }

    /// Closes the node's local round (invoked once per own timer tick).
    ///
    /// B phase: the counter increments when strictly more observations are
    /// "ahead" (phase C, or counter >= own) than "behind" (phase B with
    /// counter < own); at `ctr_max` the node enters C. C phase: fixed
    /// countdown of `c_phase` rounds, then D (stop).
    pub fn tick(&mut self, cfg: &StoppingConfig, n: usize) -> McDecision {
        let decision = match self.phase {
            McPhase::B => {
                let ahead = self
                    .observations
                    .iter()
                    .filter(|a| a.phase != McPhase::B || a.counter >= self.counter)
                    .count();
                let behind = self
                    .observations
                    .iter()
                    .filter(|a| a.phase == McPhase::B && a.counter < self.counter)
                    .count();
                if ahead > behind {
                    self.counter += 1;
                }
                if self.counter >= cfg.ctr_max(n) {
                    self.phase = McPhase::C;
                }
                McDecision::Continue
            }
            McPhase::C => {
                self.c_countdown = self.c_countdown.saturating_sub(1);
                if self.c_countdown == 0 {
                    self.phase = McPhase::D;
                    McDecision::Stop
                } else {
                    McDecision::Continue
                }
            }
            McPhase::D => McDecision::Stop,
        };
        self.observations.clear();
        decision
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(criterion: Criterion) -> StoppingConfig {
        StoppingConfig::with_criterion(criterion)
    }

    #[test]
    fn nlogn_anchor_value() {
        // n chosen so ceil(n * log10 n) lands on 304,411.
        assert_eq!(tick_budget(&cfg(Criterion::NLogN), 63_392).unwrap(), 304_411);
    }

    #[test]
    fn logsq_thousand() {
        // log10(1000)^2 = 9 exactly; float noise must not bump it to 10.
        assert_eq!(tick_budget(&cfg(Criterion::LogSqN), 1000).unwrap(), 9);
    }

    #[test]
    fn log3lnln_small_n() {
        // ceil(1 + 4 * ln ln 3) = ceil(1.378) = 2
        assert_eq!(tick_budget(&cfg(Criterion::Log3PlusLnLn), 3).unwrap(), 2);
    }

    #[test]
    fn budgets_positive_for_tiny_n() {
        for criterion in [
            Criterion::Log3PlusLnLn,
            Criterion::LogN,
            Criterion::LogSqN,
            Criterion::NLogN,
        ] {
            for n in 2..=10 {
                let b = tick_budget(&cfg(criterion), n).unwrap();
                assert!(b >= 1, "{criterion:?} n={n} gave {b}");
            }
        }
    }

    #[test]
    fn non_budget_criteria_rejected() {
        assert!(tick_budget(&cfg(Criterion::None), 100).is_err());
        assert!(tick_budget(&cfg(Criterion::MedianCounter), 100).is_err());
    }

    #[test]
    fn log_base_configurable() {
        let mut c = cfg(Criterion::LogN);
        c.log_base = 2.0;
        assert_eq!(tick_budget(&c, 1024).unwrap(), 10);
        c.log_base = 10.0;
        assert_eq!(tick_budget(&c, 1024).unwrap(), 4);
    }

    #[test]
    fn multipliers_scale_budgets() {
        let mut c = cfg(Criterion::LogN);
        c.c_log = 3.0;
        assert_eq!(tick_budget(&c, 1000).unwrap(), 9);
    }

    #[test]
    fn mc_constants_for_2000_nodes() {
        let c = cfg(Criterion::MedianCounter);
        // log2 log2 2000 = 3.455; ceil(2 * 3.455) = 7
        assert_eq!(c.ctr_max(2000), 8);
        assert_eq!(c.c_phase(2000), 7);
        // 4 * ceil(log2 2000) = 4 * 11
        assert_eq!(c.safety_cap(2000), 44);
    }

    #[test]
    fn mc_overrides_win() {
        let mut c = cfg(Criterion::MedianCounter);
        c.mc_ctr_max = 3;
        c.mc_c_phase = 2;
        c.mc_safety = 1;
        assert_eq!(c.ctr_max(1_000_000), 3);
        assert_eq!(c.c_phase(1_000_000), 2);
        assert_eq!(c.safety_cap(1024), 10);
    }

    #[test]
    fn runtime_resolution_per_criterion() {
        let sr = StoppingRuntime::resolve(&cfg(Criterion::NLogN), 1000).unwrap();
        assert_eq!(sr.budget, Some(3000));
        assert_eq!(sr.safety_cap, None);

        let sr = StoppingRuntime::resolve(&cfg(Criterion::MedianCounter), 2000).unwrap();
        assert_eq!(sr.budget, None);
        assert_eq!(sr.safety_cap, Some(44));

        let sr = StoppingRuntime::resolve(&cfg(Criterion::None), 2000).unwrap();
        assert_eq!(sr.budget, None);
        assert_eq!(sr.safety_cap, None);

        // Degenerate single-node graph still gets a positive budget.
        let sr = StoppingRuntime::resolve(&cfg(Criterion::LogN), 1).unwrap();
        assert_eq!(sr.budget, Some(1));
    }

    #[test]
    fn b_phase_majority_rule() {
        let c = cfg(Criterion::MedianCounter);
        let mut s = McState::new_informed(&c, 2000);
        s.counter = 2;
        s.observe(McAnnotation { phase: McPhase::B, counter: 2 });
        s.observe(McAnnotation { phase: McPhase::B, counter: 3 });
        s.observe(McAnnotation { phase: McPhase::B, counter: 1 });
        assert_eq!(s.tick(&c, 2000), McDecision::Continue);
        assert_eq!(s.counter(), 3);
    }

    #[test]
    fn b_phase_no_observations_keeps_counter() {
        let c = cfg(Criterion::MedianCounter);
        let mut s = McState::new_informed(&c, 2000);
        s.counter = 2;
        assert_eq!(s.tick(&c, 2000), McDecision::Continue);
        assert_eq!(s.counter(), 2);
    }

    #[test]
    fn c_phase_countdown_reaches_stop() {
        let mut c = cfg(Criterion::MedianCounter);
        c.mc_ctr_max = 2;
        c.mc_c_phase = 1;
        let mut s = McState::new_informed(&c, 2000);
        s.phase = McPhase::C;
        s.c_countdown = 1;
        assert_eq!(s.tick(&c, 2000), McDecision::Stop);
        assert_eq!(s.phase(), McPhase::D);
    }

    #[test]
    fn d_phase_absorbing() {
        let c = cfg(Criterion::MedianCounter);
        let mut s = McState::new_informed(&c, 2000);
        s.phase = McPhase::D;
        s.observe(McAnnotation { phase: McPhase::B, counter: 1 });
        assert!(s.observations.is_empty(), "D-phase observations are ignored");
        assert_eq!(s.tick(&c, 2000), McDecision::Stop);
        assert_eq!(s.phase(), McPhase::D);
    }

    #[test]
    fn counter_monotone_and_phase_ordered() {
        let c = cfg(Criterion::MedianCounter);
        let mut s = McState::new_informed(&c, 2000);
        let mut last_counter = s.counter();
        let mut last_phase = s.phase();
        for round in 0..100 {
            // Feed alternating ahead/behind observations.
            if round % 2 == 0 {
                s.observe(McAnnotation { phase: McPhase::C, counter: 1 });
            } else {
                s.observe(McAnnotation { phase: McPhase::B, counter: 0 });
            }
            s.tick(&c, 2000);
            assert!(s.counter() >= last_counter);
            assert!(s.phase() >= last_phase);
            last_counter = s.counter();
            last_phase = s.phase();
        }
        assert_eq!(s.phase(), McPhase::D, "persistent ahead-majority must terminate");
    }

    #[test]
    fn progression_b_through_d_with_constant_pressure() {
        let mut c = cfg(Criterion::MedianCounter);
        c.mc_ctr_max = 3;
        c.mc_c_phase = 2;
        let mut s = McState::new_informed(&c, 2000);
        let mut ticks = 0;
        while s.phase() != McPhase::D {
            s.observe(McAnnotation { phase: McPhase::C, counter: 99 });
            s.tick(&c, 2000);
            ticks += 1;
            assert!(ticks < 20, "must converge quickly under C pressure");
        }
        // B: counter 1 -> 2 -> 3 (2 ticks, hits ctr_max), C: 2 ticks.
        assert_eq!(ticks, 4);
    }
}
