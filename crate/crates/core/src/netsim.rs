//! Deterministic asynchronous network with an adversarial scheduler,
//! adaptive corruption and Byzantine behaviour injection.
//!
//! One run is a single thread of event delivery: each step the scheduler
//! picks one in-flight envelope, the receiving actor handles it, and every
//! self-message and coin value it triggers is processed before the next step.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bytes::Bytes;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coin::CoinOracle;
use crate::machine::{drive, CoinKey, Machine, Outbox};
use crate::metrics::{RunMetrics, StampedFact, TraceRecord};
use crate::types::{NodeId, ProtocolTag};
use crate::wire::{Envelope, Kind, Payload};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerKind {
    #[default]
    Fifo,
    Random,
    /// Delays messages to a targeted set of honest nodes up to the starvation bound.
    Worst,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 3] = [SchedulerKind::Fifo, SchedulerKind::Random, SchedulerKind::Worst];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Fifo => "fifo",
            SchedulerKind::Random => "random",
            SchedulerKind::Worst => "worst",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scheduler {s:?}"))
    }
}

impl std::str::FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown adversary {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    #[default]
    None,
    /// `t` nodes never send anything.
    Crash,
    /// `t` nodes run two honest shadows with different inputs, each talking to half the network.
    Equivocate,
    /// `t` nodes run honestly but corrupt every coded symbol they send.
    ForgeShares,
    /// `t` nodes drop their quorum messages and talk only to the first half of the network.
    WithholdQuorum,
    /// `t` crashed nodes plus a worst-case scheduler against `t` honest nodes.
    WorstCaseDelay,
    /// Up to `t` nodes corrupted mid-run, then lying to the second half of the network.
    Adaptive,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 7] = [
        AdversaryKind::None,
        AdversaryKind::Crash,
        AdversaryKind::Equivocate,
        AdversaryKind::ForgeShares,
        AdversaryKind::WithholdQuorum,
        AdversaryKind::WorstCaseDelay,
        AdversaryKind::Adaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::None => "none",
            AdversaryKind::Crash => "crash",
            AdversaryKind::Equivocate => "equivocate",
            AdversaryKind::ForgeShares => "forge-shares",
            AdversaryKind::WithholdQuorum => "withhold-quorum",
            AdversaryKind::WorstCaseDelay => "worst-case-delay",
            AdversaryKind::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("corruption budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: usize },
    #[error("expected {expected} inputs, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("fault bound t={t} out of range for n={n}")]
    BadFaultBound { n: usize, t: usize },
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub scheduler: SchedulerKind,
    pub adversary: AdversaryKind,
    pub step_limit: u64,
    /// Anti-starvation bound of the worst-case scheduler; `None` means `64·n²`.
    pub starvation_bound: Option<u64>,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(n: usize, t: usize, seed: u64) -> Self {
        SimConfig {
            n,
            t,
            seed,
            scheduler: SchedulerKind::Fifo,
            adversary: AdversaryKind::None,
            step_limit: 5_000_000,
            starvation_bound: None,
            record_trace: false,
        }
    }

    pub fn bound(&self) -> u64 {
        self.starvation_bound.unwrap_or(64 * (self.n as u64).pow(2))
    }
}

/// The corruption set and its budget.
#[derive(Clone, Debug)]
pub struct AdversaryState {
    budget: usize,
    corrupted: BTreeSet<NodeId>,
}

impl AdversaryState {
    pub fn new(budget: usize) -> Self {
        AdversaryState {
            budget,
            corrupted: BTreeSet::new(),
        }
    }

    /// Corrupt `node`; corrupting an already corrupted node is a no-op.
    pub fn corrupt(&mut self, node: NodeId) -> Result<bool, SimError> {
        if self.corrupted.contains(&node) {
            return Ok(false);
        }
        if self.corrupted.len() >= self.budget {
            return Err(SimError::BudgetExceeded { budget: self.budget });
        }
        self.corrupted.insert(node);
        Ok(true)
    }

    pub fn is_corrupted(&self, node: NodeId) -> bool {
        self.corrupted.contains(&node)
    }

    pub fn corrupted(&self) -> &BTreeSet<NodeId> {
        &self.corrupted
    }
}

/// An envelope waiting in the network.
#[derive(Clone, Debug)]
pub struct InFlight {
    pub env: Envelope,
    pub depth: u32,
    /// Step at which it was sent.
    pub injected: u64,
}

/// Pending-envelope pool with a delivery policy.
#[derive(Debug)]
pub struct Scheduler {
    kind: SchedulerKind,
    rng: ChaCha8Rng,
    fifo: VecDeque<InFlight>,
    pool: Vec<InFlight>,
    delayed: VecDeque<InFlight>,
    targets: BTreeSet<NodeId>,
    bound: u64,
}

impl Scheduler {
    pub fn new(kind: SchedulerKind, seed: u64, targets: BTreeSet<NodeId>, bound: u64) -> Self {
        Scheduler {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
            fifo: VecDeque::new(),
            pool: Vec::new(),
            delayed: VecDeque::new(),
            targets,
            bound,
        }
    }

    pub fn len(&self) -> usize {
        self.fifo.len() + self.pool.len() + self.delayed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, m: InFlight) {
        match self.kind {
            SchedulerKind::Fifo => self.fifo.push_back(m),
            SchedulerKind::Random => self.pool.push(m),
            SchedulerKind::Worst => {
                if self.targets.contains(&m.env.to) {
                    self.delayed.push_back(m);
                } else {
                    self.pool.push(m);
                }
            }
        }
    }

    /// The next envelope to deliver at step `now`.
    pub fn next(&mut self, now: u64) -> Option<InFlight> {
        match self.kind {
            SchedulerKind::Fifo => self.fifo.pop_front(),
            SchedulerKind::Random => self.pick_random(),
            SchedulerKind::Worst => {
                let overdue = self
                    .delayed
                    .front()
                    .is_some_and(|m| now.saturating_sub(m.injected) >= self.bound);
                if overdue {
                    return self.delayed.pop_front();
                }
                self.pick_random().or_else(|| self.delayed.pop_front())
            }
        }
    }

    fn pick_random(&mut self) -> Option<InFlight> {
        if self.pool.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..self.pool.len());
        Some(self.pool.swap_remove(i))
    }

    /// Drop every undelivered envelope sent by `node`; returns how many.
    pub fn remove_from(&mut self, node: NodeId) -> usize {
        let before = self.len();
        self.fifo.retain(|m| m.env.from != node);
        self.pool.retain(|m| m.env.from != node);
        self.delayed.retain(|m| m.env.from != node);
        before - self.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fault {
    ForgeShares,
    Withhold,
    /// Adaptive corruption: lie to the second half of the network.
    Lying,
}

enum Actor {
    Honest(Box<dyn Machine>),
    Crashed,
    Equivocator {
        a: Box<dyn Machine>,
        b: Box<dyn Machine>,
    },
    Faulty {
        inner: Box<dyn Machine>,
        fault: Fault,
    },
    /// Transitional state while an actor is being replaced.
    Gone,
}

enum Event {
    Start,
    Msg {
        from: NodeId,
        tag: ProtocolTag,
        payload: Payload,
    },
    Coin {
        key: CoinKey,
        value: u32,
    },
}

/// Everything a run produces.
#[derive(Debug)]
pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub facts: Vec<StampedFact>,
    /// Nodes never corrupted during the run.
    pub honest: BTreeSet<NodeId>,
    pub corrupted: BTreeSet<NodeId>,
    pub trace: Vec<TraceRecord>,
    /// Largest delivery age of an envelope to a targeted node (worst-case scheduler only).
    pub max_targeted_age: u64,
    /// Resolved coin instances per tag group.
    pub coins_by_group: BTreeMap<u32, u64>,
}

/// Build a node's state machine from its id and input.
pub type Factory<'a> = dyn Fn(NodeId, Bytes) -> Box<dyn Machine> + Sync + 'a;

#[derive(Clone, Copy, Debug)]
enum Trigger {
    OnReady,
    AtStep(u64),
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    actors: Vec<Actor>,
    adversary: AdversaryState,
    oracle: CoinOracle,
    sched: Scheduler,
    depth: Vec<u32>,
    step: u64,
    work: VecDeque<(NodeId, Event, u32)>,
    decided: Vec<Option<(Bytes, u32, Option<u16>)>>,
    facts: Vec<StampedFact>,
    trace: Vec<TraceRecord>,
    digest: Sha256,
    bits: u64,
    msgs: u64,
    violations: Vec<String>,
    adaptive: Vec<(NodeId, Trigger)>,
    max_targeted_age: u64,
}

/// Run `n` machines built by `factory` on `inputs` under `cfg`.
pub fn run(cfg: &SimConfig, inputs: &[Bytes], factory: &Factory) -> Result<RunOutcome, SimError> {
    let n = cfg.n;
    if inputs.len() != n {
        return Err(SimError::InputCount {
            expected: n,
            got: inputs.len(),
        });
    }
    if n == 0 || cfg.t >= n {
        return Err(SimError::BadFaultBound { n, t: cfg.t });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6164_7665_7273_6172);
    let mut ids: Vec<NodeId> = (0..n).map(NodeId::from_slot).collect();
    ids.shuffle(&mut rng);
    let faulty: BTreeSet<NodeId> = ids[..cfg.t].iter().copied().collect();
    let others: Vec<NodeId> = ids[cfg.t..].to_vec();

    let mut adversary = AdversaryState::new(cfg.t);
    let mut scheduler_kind = cfg.scheduler;
    let mut targets = BTreeSet::new();
    let mut adaptive = Vec::new();
    match cfg.adversary {
        AdversaryKind::None => {}
        AdversaryKind::Adaptive => {
            for &node in &faulty {
                let trigger = if rng.gen_bool(0.5) {
                    Trigger::OnReady
                } else {
                    Trigger::AtStep(rng.gen_range(0..50 * (n as u64).pow(2)))
                };
                adaptive.push((node, trigger));
            }
        }
        AdversaryKind::WorstCaseDelay => {
            scheduler_kind = SchedulerKind::Worst;
            targets = others.iter().take(cfg.t).copied().collect();
            for &node in &faulty {
                adversary.corrupt(node)?;
            }
        }
        _ => {
            for &node in &faulty {
                adversary.corrupt(node)?;
            }
        }
    }
    if scheduler_kind == SchedulerKind::Worst && targets.is_empty() {
        targets = others.iter().take(cfg.t.max(1)).copied().collect();
    }

    let mut actors = Vec::with_capacity(n);
    for (slot, input) in inputs.iter().enumerate() {
        let id = NodeId::from_slot(slot);
        let actor = if !adversary.is_corrupted(id) {
            Actor::Honest(factory(id, input.clone()))
        } else {
            match cfg.adversary {
                AdversaryKind::Crash | AdversaryKind::WorstCaseDelay => Actor::Crashed,
                AdversaryKind::Equivocate => {
                    let other = alternative_input(input, &mut rng);
                    Actor::Equivocator {
                        a: factory(id, input.clone()),
                        b: factory(id, other),
                    }
                }
                AdversaryKind::ForgeShares => Actor::Faulty {
                    inner: factory(id, input.clone()),
                    fault: Fault::ForgeShares,
                },
                AdversaryKind::WithholdQuorum => Actor::Faulty {
                    inner: factory(id, input.clone()),
                    fault: Fault::Withhold,
                },
                AdversaryKind::None | AdversaryKind::Adaptive => unreachable!("no static corruption"),
            }
        };
        actors.push(actor);
    }

    let mut sim = Sim {
        cfg,
        actors,
        adversary,
        oracle: CoinOracle::new(cfg.seed),
        sched: Scheduler::new(scheduler_kind, cfg.seed, targets, cfg.bound()),
        depth: vec![0; n],
        step: 0,
        work: VecDeque::new(),
        decided: vec![None; n],
        facts: Vec::new(),
        trace: Vec::new(),
        digest: Sha256::new(),
        bits: 0,
        msgs: 0,
        violations: Vec::new(),
        adaptive,
        max_targeted_age: 0,
    };
    sim.execute();
    Ok(sim.finish())
}

/// A different input for an equivocating shadow; half the time it also
/// breaks the trailing bytes so that validity predicates can reject it.
fn alternative_input(input: &Bytes, rng: &mut ChaCha8Rng) -> Bytes {
    let mut v = input.to_vec();
    if v.is_empty() {
        v.push(0);
    }
    v[0] ^= 0xff;
    if rng.gen_bool(0.5) {
        let last = v.len() - 1;
        v[last] ^= 0x01;
    }
    Bytes::from(v)
}

impl Sim<'_> {
    fn execute(&mut self) {
        for slot in 0..self.cfg.n {
            self.work.push_back((NodeId::from_slot(slot), Event::Start, 0));
        }
        self.process_work();
        loop {
            if !self.violations.is_empty() {
                return;
            }
            if self.all_decided() {
                return;
            }
            if self.step >= self.cfg.step_limit {
                self.violations
                    .push(format!("liveness: step limit {} reached", self.cfg.step_limit));
                return;
            }
            self.fire_step_triggers();
            let Some(m) = self.sched.next(self.step) else {
                self.violations
                    .push("liveness: no messages in flight and undecided honest nodes".to_string());
                return;
            };
            self.step += 1;
            self.record_delivery(&m);
            let env = m.env;
            self.work.push_back((
                env.to,
                Event::Msg {
                    from: env.from,
                    tag: env.tag,
                    payload: env.payload,
                },
                m.depth,
            ));
            self.process_work();
        }
    }

    fn all_decided(&self) -> bool {
        (0..self.cfg.n).all(|slot| {
            let id = NodeId::from_slot(slot);
            self.adversary.is_corrupted(id) || self.decided[slot].is_some()
        })
    }

    fn record_delivery(&mut self, m: &InFlight) {
        let env = &m.env;
        let bits = env.bit_size();
        if self.sched.targets.contains(&env.to) {
            self.max_targeted_age = self.max_targeted_age.max(self.step - m.injected);
        }
        self.digest.update(self.step.to_be_bytes());
        self.digest.update(env.from.0.to_be_bytes());
        self.digest.update(env.to.0.to_be_bytes());
        self.digest.update([env.kind() as u8]);
        self.digest.update(bits.to_be_bytes());
        self.digest.update(m.depth.to_be_bytes());
        if self.cfg.record_trace {
            self.trace.push(TraceRecord {
                step: self.step,
                from: env.from.0,
                to: env.to.0,
                kind: env.kind().name().to_string(),
                tag: env.tag.to_string(),
                bits,
                depth: m.depth,
            });
        }
    }

    fn fire_step_triggers(&mut self) {
        let due: Vec<NodeId> = self
            .adaptive
            .iter()
            .filter(|(_, tr)| matches!(tr, Trigger::AtStep(s) if *s <= self.step))
            .map(|(id, _)| *id)
            .collect();
        for id in due {
            self.corrupt_adaptively(id);
        }
    }

    fn corrupt_adaptively(&mut self, id: NodeId) {
        self.adaptive.retain(|(node, _)| *node != id);
        match self.adversary.corrupt(id) {
            Ok(true) => {}
            Ok(false) => return,
            Err(e) => {
                self.violations.push(format!("adversary: {e}"));
                return;
            }
        }
        self.sched.remove_from(id);
        let slot = id.slot();
        let actor = std::mem::replace(&mut self.actors[slot], Actor::Gone);
        self.actors[slot] = match actor {
            Actor::Honest(inner) => Actor::Faulty {
                inner,
                fault: Fault::Lying,
            },
            other => other,
        };
        self.decided[slot] = None;
    }

    fn process_work(&mut self) {
        while let Some((node, event, depth)) = self.work.pop_front() {
            if !self.violations.is_empty() {
                self.work.clear();
                return;
            }
            self.handle(node, event, depth);
        }
    }

    fn handle(&mut self, node: NodeId, event: Event, depth: u32) {
        let slot = node.slot();
        let honest = !self.adversary.is_corrupted(node);
        if honest {
            self.depth[slot] = self.depth[slot].max(depth);
        }
        let node_depth = if honest { self.depth[slot] } else { depth };
        let actor = std::mem::replace(&mut self.actors[slot], Actor::Gone);
        let mut actor = actor;
        let mut outputs: Vec<(Outbox, Half)> = Vec::new();
        let result = catch_unwind(AssertUnwindSafe(|| match &mut actor {
            Actor::Honest(m) | Actor::Faulty { inner: m, .. } => {
                outputs.push((apply(m.as_mut(), node, &event), Half::All));
            }
            Actor::Equivocator { a, b } => {
                outputs.push((apply(a.as_mut(), node, &event), Half::First));
                outputs.push((apply(b.as_mut(), node, &event), Half::Second));
            }
            Actor::Crashed | Actor::Gone => {}
        }));
        if let Err(panic) = result {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            self.actors[slot] = actor;
            if honest {
                self.violations.push(format!("internal: {node} panicked: {msg}"));
            }
            return;
        }
        let fault = match &actor {
            Actor::Faulty { fault, .. } => Some(*fault),
            _ => None,
        };
        if honest {
            if let Actor::Honest(m) = &actor {
                if self.decided[slot].is_none() {
                    if let Some(v) = m.decision() {
                        self.decided[slot] = Some((v.clone(), node_depth, m.decision_round()));
                    }
                }
            }
        }
        self.actors[slot] = actor;

        let mut sent_ready = false;
        for (out, half) in outputs {
            for fact in out.facts {
                if honest {
                    self.facts.push(StampedFact {
                        step: self.step,
                        node,
                        fact,
                    });
                }
            }
            for (to, tag, payload) in out.network {
                if !half.admits(to, self.cfg.n) {
                    continue;
                }
                let payload = match fault {
                    None => payload,
                    Some(f) => match tamper(f, to, self.cfg.n, payload) {
                        Some(p) => p,
                        None => continue,
                    },
                };
                if payload.kind() == Kind::Ready {
                    sent_ready = true;
                }
                let env = Envelope::new(tag, node, to, payload);
                if honest {
                    self.bits += env.bit_size();
                    self.msgs += 1;
                }
                self.sched.push(InFlight {
                    env,
                    depth: node_depth + 1,
                    injected: self.step,
                });
            }
            for req in out.coins {
                for rel in self.oracle.activate(node, honest, &req) {
                    self.work.push_back((
                        rel.node,
                        Event::Coin {
                            key: rel.key,
                            value: rel.value,
                        },
                        node_depth,
                    ));
                }
            }
        }
        if honest && sent_ready {
            let triggered = self
                .adaptive
                .iter()
                .any(|(id, tr)| *id == node && matches!(tr, Trigger::OnReady));
            if triggered {
                self.corrupt_adaptively(node);
            }
        }
    }

    fn finish(self) -> RunOutcome {
        let honest: BTreeSet<NodeId> = (0..self.cfg.n)
            .map(NodeId::from_slot)
            .filter(|id| !self.adversary.is_corrupted(*id))
            .collect();
        let mut metrics = RunMetrics {
            total_bits: self.bits,
            total_msgs: self.msgs,
            coins: self.oracle.resolved(),
            elections: self.oracle.resolved_elections(),
            steps: self.step,
            violations: self.violations,
            ..RunMetrics::default()
        };
        for id in &honest {
            if let Some((value, depth, round)) = &self.decided[id.slot()] {
                metrics.decided.insert(id.0, hex::encode(value));
                metrics.rounds = metrics.rounds.max(*depth as u64);
                if let Some(r) = round {
                    metrics.election_rounds = Some(metrics.election_rounds.unwrap_or(0).max(*r));
                }
            }
        }
        metrics.trace_digest = hex::encode(self.digest.finalize());
        RunOutcome {
            metrics,
            facts: self.facts,
            corrupted: self.adversary.corrupted().clone(),
            honest,
            trace: self.trace,
            max_targeted_age: self.max_targeted_age,
            coins_by_group: self.oracle.resolved_by_group().clone(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Half {
    All,
    First,
    Second,
}

impl Half {
    fn admits(self, to: NodeId, n: usize) -> bool {
        match self {
            Half::All => true,
            Half::First => to.slot() < n / 2,
            Half::Second => to.slot() >= n / 2,
        }
    }
}

fn apply(m: &mut dyn Machine, me: NodeId, event: &Event) -> Outbox {
    match event {
        Event::Start => drive(m, me, |m, out| m.start(out)),
        Event::Msg { from, tag, payload } => drive(m, me, |m, out| m.handle(*from, tag, payload, out)),
        Event::Coin { key, value } => drive(m, me, |m, out| m.on_coin(key, *value, out)),
    }
}

/// Apply a fault to an outgoing payload; `None` drops it.
fn tamper(fault: Fault, to: NodeId, n: usize, payload: Payload) -> Option<Payload> {
    match fault {
        Fault::ForgeShares => Some(forge_symbols(payload)),
        Fault::Withhold => {
            let quorum = matches!(
                payload.kind(),
                Kind::Vote
                    | Kind::Lock
                    | Kind::Ready
                    | Kind::Finish
                    | Kind::Election
                    | Kind::Confirm
                    | Kind::Si1
                    | Kind::Si2
            );
            if quorum || to.slot() >= n / 2 {
                None
            } else {
                Some(payload)
            }
        }
        Fault::Lying => {
            if to.slot() < n / 2 {
                Some(payload)
            } else {
                Some(flip_bits(forge_symbols(payload)))
            }
        }
    }
}

fn scramble(b: &Bytes) -> Bytes {
    if b.is_empty() {
        return Bytes::from_static(&[0xa5]);
    }
    Bytes::from(b.iter().map(|x| x ^ 0xa5).collect::<Vec<u8>>())
}

/// Replace every coded symbol carried by `payload` with garbage of the same length.
pub fn forge_symbols(payload: Payload) -> Payload {
    use Payload::*;
    match payload {
        Initial(b) => Initial(scramble(&b)),
        Symbol { theirs, mine } => Symbol {
            theirs: scramble(&theirs),
            mine: scramble(&mine),
        },
        CorrectSymbol(b) => CorrectSymbol(scramble(&b)),
        Share(b) => Share(scramble(&b)),
        EchoShare {
            leader,
            symbol: Some(s),
        } => EchoShare {
            leader,
            symbol: Some(scramble(&s)),
        },
        HashShare { commit, symbol, proof } => HashShare {
            commit,
            symbol: scramble(&symbol),
            proof,
        },
        HashEcho {
            leader,
            commit,
            symbol,
            proof,
        } => HashEcho {
            leader,
            commit,
            symbol: scramble(&symbol),
            proof,
        },
        RbcSend(b) => RbcSend(scramble(&b)),
        RbcEcho(b) => RbcEcho(scramble(&b)),
        RbcReady(b) => RbcReady(scramble(&b)),
        MbaValue(Some(v)) => MbaValue(Some(scramble(&v))),
        other => other,
    }
}

/// Invert every binary field of `payload`.
pub fn flip_bits(payload: Payload) -> Payload {
    use Payload::*;
    match payload {
        Si1(v) => Si1(!v),
        Si2(v) => Si2(!v),
        RbaReady(v) => RbaReady(!v),
        MbaPerhaps(v) => MbaPerhaps(!v),
        AbbaValue { a, b } => AbbaValue { a: a ^ 1, b: b ^ 1 },
        AbaBval { round, value } => AbaBval {
            round,
            value: value ^ 1,
        },
        AbaAux { round, value } => AbaAux {
            round,
            value: value ^ 1,
        },
        AbaConf { round, values } => AbaConf {
            round,
            values: match values {
                1 => 2,
                2 => 1,
                v => v,
            },
        },
        AbaTerm { value } => AbaTerm { value: value ^ 1 },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(from: u16, to: u16) -> Envelope {
        Envelope::new(
            ProtocolTag::new(Bytes::from_static(b"x"), 1, crate::types::Sub::None),
            NodeId(from),
            NodeId(to),
            Payload::Vote,
        )
    }

    fn flight(from: u16, to: u16, injected: u64) -> InFlight {
        InFlight {
            env: env(from, to),
            depth: 0,
            injected,
        }
    }

    #[test]
    fn fifo_preserves_order() {
        let mut s = Scheduler::new(SchedulerKind::Fifo, 1, BTreeSet::new(), 10);
        for i in 1..=5 {
            s.push(flight(i, 1, 0));
        }
        let order: Vec<u16> = std::iter::from_fn(|| s.next(0)).map(|m| m.env.from.0).collect();
        assert_eq!(order, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn random_is_reproducible() {
        let draw = |seed| {
            let mut s = Scheduler::new(SchedulerKind::Random, seed, BTreeSet::new(), 10);
            for i in 1..=20 {
                s.push(flight(i, 1, 0));
            }
            std::iter::from_fn(|| s.next(0))
                .map(|m| m.env.from.0)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn worst_delays_targets_until_bound() {
        let targets: BTreeSet<NodeId> = [NodeId(2)].into_iter().collect();
        let mut s = Scheduler::new(SchedulerKind::Worst, 1, targets, 5);
        s.push(flight(1, 2, 0));
        for i in 0..10 {
            s.push(flight(1, 3, i));
        }
        let mut step = 0;
        let mut target_step = None;
        while let Some(m) = s.next(step) {
            if m.env.to == NodeId(2) {
                target_step = Some(step);
            }
            step += 1;
        }
        assert_eq!(target_step, Some(5));
    }

    #[test]
    fn remove_from_drops_sender_traffic() {
        let mut s = Scheduler::new(SchedulerKind::Random, 1, BTreeSet::new(), 10);
        s.push(flight(1, 2, 0));
        s.push(flight(2, 1, 0));
        s.push(flight(1, 3, 0));
        assert_eq!(s.remove_from(NodeId(1)), 2);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn budget_is_enforced_and_idempotent() {
        let mut a = AdversaryState::new(1);
        assert_eq!(a.corrupt(NodeId(3)), Ok(true));
        assert_eq!(a.corrupt(NodeId(3)), Ok(false));
        assert_eq!(a.corrupt(NodeId(4)), Err(SimError::BudgetExceeded { budget: 1 }));
        assert_eq!(a.corrupted().len(), 1);
    }

    #[test]
    fn withholding_drops_quorum_kinds() {
        assert_eq!(tamper(Fault::Withhold, NodeId(1), 4, Payload::Vote), None);
        assert_eq!(tamper(Fault::Withhold, NodeId(1), 4, Payload::RbaReady(true)), None);
        assert_eq!(
            tamper(Fault::Withhold, NodeId(1), 4, Payload::Share(Bytes::from_static(b"a"))),
            Some(Payload::Share(Bytes::from_static(b"a")))
        );
        assert_eq!(
            tamper(Fault::Withhold, NodeId(4), 4, Payload::Share(Bytes::from_static(b"a"))),
            None
        );
    }

    #[test]
    fn lying_targets_second_half() {
        let p = Payload::Si1(true);
        assert_eq!(tamper(Fault::Lying, NodeId(1), 4, p.clone()), Some(p.clone()));
        assert_eq!(tamper(Fault::Lying, NodeId(4), 4, p), Some(Payload::Si1(false)));
    }
}
