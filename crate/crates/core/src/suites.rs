//! Standalone runs of single sub-protocols under the adversarial simulator,
//! with the matching trace audits.
//!
//! Each run draws an input pattern from the seed. Some patterns only promise
//! safety (for example a biased agreement whose inputs break its termination
//! condition); for those, a stalled run is not counted as a violation.

use std::collections::BTreeSet;
use std::fmt;

use bytes::Bytes;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aba::Aba;
use crate::abbba::Abbba;
use crate::audit;
use crate::harness::random_inputs;
use crate::hash::AcdHash;
use crate::machine::{CoinKey, CoinPurpose, Machine, Outbox};
use crate::merkle::DEFAULT_KAPPA;
use crate::metrics::RunMetrics;
use crate::netsim::{self, AdversaryKind, SchedulerKind, SimConfig, SimError};
use crate::rba::{Rba, RbaEvent};
use crate::rr::{AcdRr, FlatParams};
use crate::shmdm::Shmdm;
use crate::tree::{Group, NetworkTree};
use crate::types::{fault_threshold, NodeId, Predicate, ProtocolTag, Sub};
use crate::wire::Payload;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Abbba,
    Aba,
    Rba,
    AcdRr,
    AcdHash,
    Shmdm,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Abbba,
        Suite::Aba,
        Suite::Rba,
        Suite::AcdRr,
        Suite::AcdHash,
        Suite::Shmdm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Abbba => "abbba",
            Suite::Aba => "aba",
            Suite::Rba => "rba",
            Suite::AcdRr => "acd-rr",
            Suite::AcdHash => "acd-hash",
            Suite::Shmdm => "shmdm",
        }
    }

    /// Fault threshold used for `n` nodes.
    pub fn faults(self, n: usize) -> usize {
        match self {
            Suite::AcdRr => (n - 1) / 5,
            _ => fault_threshold(n),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one standalone run.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub adversary: AdversaryKind,
    pub scheduler: SchedulerKind,
    /// Short name of the drawn input pattern.
    pub pattern: &'static str,
    /// Whether the pattern promises termination.
    pub liveness_asserted: bool,
    pub metrics: RunMetrics,
    /// Safety findings, plus liveness findings when asserted.
    pub violations: Vec<String>,
}

fn suite_tag(sub: Sub) -> ProtocolTag {
    ProtocolTag::new(Bytes::from_static(b"suite"), 1, sub)
}

fn bit_bytes(b: bool) -> Bytes {
    Bytes::from(vec![b as u8])
}

struct AbbbaNode {
    inner: Abbba,
    a: bool,
    b: bool,
    decision: Option<Bytes>,
}

impl Machine for AbbbaNode {
    fn start(&mut self, out: &mut Outbox) {
        if let Ok(Some(bit)) = self.inner.input(self.a, self.b, out) {
            self.decision = Some(bit_bytes(bit));
        }
    }

    fn handle(&mut self, from: NodeId, _: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        if let Payload::AbbaValue { a, b } = *payload {
            if let Some(bit) = self.inner.on_value(from, a, b, out) {
                self.decision = Some(bit_bytes(bit));
            }
        }
    }

    fn on_coin(&mut self, _: &CoinKey, _: u32, _: &mut Outbox) {}

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

struct AbaNode {
    inner: Aba,
    bit: bool,
    decision: Option<Bytes>,
}

impl AbaNode {
    fn note(&mut self, bit: Option<bool>) {
        if let (Some(b), None) = (bit, &self.decision) {
            self.decision = Some(bit_bytes(b));
        }
    }
}

impl Machine for AbaNode {
    fn start(&mut self, out: &mut Outbox) {
        let d = self.inner.input(self.bit, out).ok().flatten();
        self.note(d);
    }

    fn handle(&mut self, from: NodeId, _: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        let d = self.inner.handle(from, payload, out);
        self.note(d);
    }

    fn on_coin(&mut self, key: &CoinKey, value: u32, out: &mut Outbox) {
        if let CoinPurpose::Binary(round) = key.purpose {
            let d = self.inner.on_coin(round, value == 1, out);
            self.note(d);
        }
    }

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

/// Reliable agreement driven to its output phase by the node's own vote
/// for 1, standing in for a binary agreement that decided 1.
struct RbaNode {
    inner: Rba,
    input: Bytes,
    bit_given: bool,
    decision: Option<Bytes>,
}

impl RbaNode {
    fn absorb(&mut self, ev: Vec<RbaEvent>, out: &mut Outbox) {
        let mut queue = ev;
        while let Some(e) = queue.pop() {
            match e {
                RbaEvent::Vote(true) if !self.bit_given => {
                    self.bit_given = true;
                    queue.extend(self.inner.decision_bit(out));
                }
                RbaEvent::Output(v) if self.decision.is_none() => {
                    self.decision = Some(v.unwrap_or_default());
                }
                _ => {}
            }
        }
    }
}

impl Machine for RbaNode {
    fn start(&mut self, out: &mut Outbox) {
        if let Ok(ev) = self.inner.input(self.input.clone(), out) {
            self.absorb(ev, out);
        }
    }

    fn handle(&mut self, from: NodeId, _: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        let ev = self.inner.handle(from, payload, out);
        self.absorb(ev, out);
    }

    fn on_coin(&mut self, _: &CoinKey, _: u32, _: &mut Outbox) {}

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

#[allow(clippy::large_enum_variant)]
enum Acd {
    Rr(AcdRr),
    Hash(AcdHash),
}

struct AcdNode {
    inner: Acd,
    input: Bytes,
    decision: Option<Bytes>,
}

impl Machine for AcdNode {
    fn start(&mut self, out: &mut Outbox) {
        match &mut self.inner {
            Acd::Rr(a) => a.disperse(&self.input, out),
            Acd::Hash(a) => a.disperse(&self.input, out),
        }
    }

    fn handle(&mut self, from: NodeId, _: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        let done = match &mut self.inner {
            Acd::Rr(a) => a.handle(from, payload, out),
            Acd::Hash(a) => a.handle(from, payload, out),
        };
        if done && self.decision.is_none() {
            self.decision = Some(Bytes::from_static(b"returned"));
        }
    }

    fn on_coin(&mut self, _: &CoinKey, _: u32, _: &mut Outbox) {}

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

struct ShmdmNode {
    inner: Shmdm,
    sender: bool,
    input: Bytes,
    decision: Option<Bytes>,
}

impl Machine for ShmdmNode {
    fn start(&mut self, out: &mut Outbox) {
        if self.sender {
            if let Ok(Some(w)) = self.inner.input(self.input.clone(), out) {
                self.decision = Some(w);
            }
        }
    }

    fn handle(&mut self, from: NodeId, _: &ProtocolTag, payload: &Payload, out: &mut Outbox) {
        if let Some(w) = self.inner.handle(from, payload, out) {
            self.decision = Some(w);
        }
    }

    fn on_coin(&mut self, _: &CoinKey, _: u32, _: &mut Outbox) {}

    fn decision(&self) -> Option<&Bytes> {
        self.decision.as_ref()
    }
}

/// Liveness findings reported by the simulator.
fn is_liveness(v: &str) -> bool {
    v.starts_with("liveness")
}

/// Run `suite` once on `n` nodes.
pub fn run_once(
    suite: Suite,
    n: usize,
    seed: u64,
    adversary: AdversaryKind,
    scheduler: SchedulerKind,
) -> Result<SuiteRun, SimError> {
    let t = suite.faults(n);
    let cfg = SimConfig {
        adversary,
        scheduler,
        step_limit: 2_000_000,
        ..SimConfig::new(n, t, seed)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7375_6974_6573);
    let slots: Vec<usize> = {
        let mut s: Vec<usize> = (0..n).collect();
        s.shuffle(&mut rng);
        s
    };
    let group = Group::all(n).with_threshold(t);
    let thresholds = move |_: &ProtocolTag| (n, t);

    let (pattern, live, outcome, mut violations) = match suite {
        Suite::Abbba => {
            // Pairs are encoded as two input bytes.
            let (pattern, live, pairs) = abbba_pattern(n, t, &slots, &mut rng);
            let inputs: Vec<Bytes> = pairs
                .iter()
                .map(|&(a, b)| Bytes::from(vec![a as u8, b as u8]))
                .collect();
            let g = group.clone();
            let factory = move |_: NodeId, input: Bytes| -> Box<dyn Machine> {
                Box::new(AbbbaNode {
                    inner: Abbba::new(suite_tag(Sub::Election(0)), g.clone()),
                    a: input[0] & 1 == 1,
                    b: input[1] & 1 == 1,
                    decision: None,
                })
            };
            let out = netsim::run(&cfg, &inputs, &factory)?;
            let v = audit::abbba(&out.facts, &thresholds);
            (pattern, live, out, v)
        }
        Suite::Aba => {
            let pattern = ["unanimous-0", "unanimous-1", "mixed"][rng.gen_range(0..3)];
            let inputs: Vec<Bytes> = (0..n)
                .map(|_| {
                    let b = match pattern {
                        "unanimous-0" => false,
                        "unanimous-1" => true,
                        _ => rng.gen_bool(0.5),
                    };
                    bit_bytes(b)
                })
                .collect();
            let g = group.clone();
            let factory = move |_: NodeId, input: Bytes| -> Box<dyn Machine> {
                Box::new(AbaNode {
                    inner: Aba::new(suite_tag(Sub::Election(0)), g.clone()),
                    bit: input[0] & 1 == 1,
                    decision: None,
                })
            };
            let out = netsim::run(&cfg, &inputs, &factory)?;
            let v = audit::aba(&out.facts);
            (pattern, true, out, v)
        }
        Suite::Rba => {
            let unanimous = rng.gen_bool(0.5);
            let values = random_inputs(2, 48, seed);
            let inputs: Vec<Bytes> = (0..n)
                .map(|_| {
                    if unanimous || rng.gen_bool(0.7) {
                        values[0].clone()
                    } else {
                        values[1].clone()
                    }
                })
                .collect();
            let g = group.clone();
            let factory = move |me: NodeId, input: Bytes| -> Box<dyn Machine> {
                Box::new(RbaNode {
                    inner: Rba::new(suite_tag(Sub::Subset(0)), g.clone(), me),
                    input,
                    bit_given: false,
                    decision: None,
                })
            };
            let out = netsim::run(&cfg, &inputs, &factory)?;
            let mut v = audit::rba(&out.facts, &thresholds);
            if unanimous {
                v.extend(audit::rba_validity(&out.facts, out.honest.len()));
            }
            (if unanimous { "unanimous" } else { "mixed" }, unanimous, out, v)
        }
        Suite::AcdRr | Suite::AcdHash => {
            let params = FlatParams {
                mvba_id: Bytes::from_static(b"suite"),
                n,
                t,
                predicate: Predicate::AcceptAll,
                kappa: DEFAULT_KAPPA,
            };
            let inputs = random_inputs(n, 64, seed);
            let hash = suite == Suite::AcdHash;
            let factory = move |me: NodeId, input: Bytes| -> Box<dyn Machine> {
                let inner = if hash {
                    Acd::Hash(AcdHash::new(&params, me))
                } else {
                    Acd::Rr(AcdRr::new(&params))
                };
                Box::new(AcdNode {
                    inner,
                    input,
                    decision: None,
                })
            };
            let out = netsim::run(&cfg, &inputs, &factory)?;
            let v = audit::acd_integrity(&out.facts, n, t);
            ("distinct", true, out, v)
        }
        Suite::Shmdm => {
            let tree = NetworkTree::build(n, 1);
            let l = rng.gen_range(0..2u8);
            let senders = tree.group(2 + l as u32).expect("two halves").clone();
            let w = random_inputs(1, 40, seed).remove(0);
            let inputs = vec![w; n];
            let g = Group::all(n);
            let tag = suite_tag(Sub::Subset(l));
            let s = senders.clone();
            let factory = move |me: NodeId, input: Bytes| -> Box<dyn Machine> {
                Box::new(ShmdmNode {
                    inner: Shmdm::new(tag.clone(), &g, s.clone()),
                    sender: s.contains(me),
                    input,
                    decision: None,
                })
            };
            let out = netsim::run(&cfg, &inputs, &factory)?;
            let bad = senders.members().iter().filter(|id| out.corrupted.contains(id)).count();
            let v = audit::shmdm_validity(&out.facts, &tree, &out.corrupted);
            // Receivers can only decode when the sending half is good.
            ("good-half", bad <= senders.t(), out, v)
        }
    };
    let liveness: Vec<String> = outcome
        .metrics
        .violations
        .iter()
        .filter(|v| !is_liveness(v) || live)
        .cloned()
        .collect();
    violations.extend(liveness);
    Ok(SuiteRun {
        n,
        t,
        seed,
        adversary,
        scheduler,
        pattern,
        liveness_asserted: live,
        metrics: outcome.metrics,
        violations,
    })
}

/// Input pairs for the biased agreement, and whether the pattern meets the
/// termination condition.
fn abbba_pattern(n: usize, t: usize, slots: &[usize], rng: &mut ChaCha8Rng) -> (&'static str, bool, Vec<(bool, bool)>) {
    let mut pairs = vec![(false, false); n];
    match rng.gen_range(0..4) {
        0 => ("all-zero", true, pairs),
        1 => {
            // 2t+1 nodes with a=1 leave at least t+1 honest ones.
            let k = rng.gen_range(2 * t + 1..=n);
            for &s in &slots[..k] {
                pairs[s] = (true, rng.gen_bool(0.5));
            }
            ("a-quorum", true, pairs)
        }
        2 => {
            // 2t+1 nodes with b=1 leave at least t+1 honest ones.
            let k = rng.gen_range(2 * t + 1..=n);
            for &s in &slots[..k] {
                pairs[s] = (rng.gen_bool(0.5), true);
            }
            ("b-quorum", true, pairs)
        }
        _ => {
            for p in pairs.iter_mut() {
                *p = (rng.gen_bool(0.3), rng.gen_bool(0.3));
            }
            ("arbitrary", false, pairs)
        }
    }
}

/// Totals over many standalone runs of one suite.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SuiteReport {
    pub runs: usize,
    pub live_runs: usize,
    pub violating_runs: usize,
    /// First violation messages, with the run they came from.
    pub examples: Vec<String>,
    /// Mean resolved coins over all runs.
    pub mean_coins: f64,
}

/// Run `seeds` seeds of `suite` for every size, adversary and scheduler.
pub fn campaign(suite: Suite, sizes: &[usize], seeds: u64) -> Result<SuiteReport, SimError> {
    Ok(summarize(&runs(suite, sizes, seeds)?))
}

pub fn summarize(runs: &[SuiteRun]) -> SuiteReport {
    let mut report = SuiteReport {
        runs: runs.len(),
        ..SuiteReport::default()
    };
    let mut seen = BTreeSet::new();
    for r in runs {
        report.live_runs += r.liveness_asserted as usize;
        report.mean_coins += r.metrics.coins as f64;
        if !r.violations.is_empty() {
            report.violating_runs += 1;
            for v in &r.violations {
                if report.examples.len() < 10 && seen.insert(v.clone()) {
                    report.examples.push(format!(
                        "n={} adversary={} scheduler={} seed={} pattern={}: {v}",
                        r.n,
                        r.adversary.name(),
                        r.scheduler.name(),
                        r.seed,
                        r.pattern
                    ));
                }
            }
        }
    }
    if !runs.is_empty() {
        report.mean_coins /= runs.len() as f64;
    }
    report
}

/// Every standalone run of a suite campaign, in job order.
pub fn runs(suite: Suite, sizes: &[usize], seeds: u64) -> Result<Vec<SuiteRun>, SimError> {
    let mut jobs = Vec::new();
    for &n in sizes {
        for adversary in AdversaryKind::ALL {
            for scheduler in SchedulerKind::ALL {
                for seed in 0..seeds {
                    jobs.push((n, seed, adversary, scheduler));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(n, seed, a, s)| run_once(suite, n, seed, a, s))
        .collect()
}
