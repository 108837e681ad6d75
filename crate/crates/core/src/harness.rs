//! Scenarios, campaigns, aggregate reports and complexity fits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use bytes::Bytes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{audit_run, AuditContext};
use crate::hash::HashNode;
use crate::machine::Machine;
use crate::merkle::DEFAULT_KAPPA;
use crate::metrics::RunMetrics;
use crate::netsim::{self, AdversaryKind, RunOutcome, SchedulerKind, SimConfig, SimError};
use crate::rmvba::{RmvbaNode, RmvbaParams};
use crate::rr::{FlatParams, RrNode};
use crate::tree::{NetworkTree, DEFAULT_LEAF_SIZE};
use crate::types::{NodeId, Predicate, ProtocolTag, MAGIC_SUFFIX};

/// Bits per coded symbol used in the fit expressions (GF(2^8)).
pub const LOG_Q: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Rmvba,
    Rr,
    Hash,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Rmvba, Protocol::Rr, Protocol::Hash];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Rmvba => "rmvba",
            Protocol::Rr => "rr",
            Protocol::Hash => "hash",
        }
    }

    /// Largest tolerated `t` for `n` nodes.
    pub fn max_faults(self, n: usize) -> usize {
        match self {
            Protocol::Rr => n.saturating_sub(1) / 5,
            _ => n.saturating_sub(1) / 3,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| HarnessError::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{protocol} needs n >= {factor}t+1, got n={n} t={t}")]
    Resilience {
        protocol: Protocol,
        n: usize,
        t: usize,
        factor: usize,
    },
    #[error("message size {0} is shorter than the {len}-byte validity suffix", len = MAGIC_SUFFIX.len())]
    MessageTooShort(usize),
    #[error("scenario needs at least one run")]
    NoRuns,
    #[error("leaf size must be at least 1")]
    LeafSize,
    #[error("kappa must be a positive multiple of 8, got {0}")]
    Kappa(usize),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("fit needs at least 3 distinct n, got {0}")]
    TooFewSizes(usize),
    #[error("claim {claim} needs {protocol} runs in the report")]
    NoData { claim: Claim, protocol: Protocol },
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn default_runs() -> usize {
    1
}

fn default_scheduler() -> SchedulerKind {
    SchedulerKind::Random
}

/// One experiment: `runs` executions with seeds `seed, seed+1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub protocol: Protocol,
    pub n: usize,
    pub t: usize,
    #[serde(alias = "msg_size")]
    pub msg_size_bytes: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub adversary: AdversaryKind,
    #[serde(default = "default_scheduler")]
    pub scheduler: SchedulerKind,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Defaults to a bound that grows with the protocol's message count.
    #[serde(default)]
    pub step_limit: Option<u64>,
    /// Leaf group size of the tree (rmvba only).
    #[serde(default, alias = "M")]
    pub leaf_size: Option<usize>,
    /// Digest bits of the commitment hash (hash only).
    #[serde(default)]
    pub kappa: Option<usize>,
}

impl Scenario {
    pub fn new(protocol: Protocol, n: usize, t: usize, msg_size_bytes: usize) -> Self {
        Scenario {
            protocol,
            n,
            t,
            msg_size_bytes,
            seed: 0,
            adversary: AdversaryKind::None,
            scheduler: default_scheduler(),
            runs: 1,
            step_limit: None,
            leaf_size: None,
            kappa: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let factor = if self.protocol == Protocol::Rr { 5 } else { 3 };
        if self.n < factor * self.t + 1 {
            return Err(HarnessError::Resilience {
                protocol: self.protocol,
                n: self.n,
                t: self.t,
                factor,
            });
        }
        if self.msg_size_bytes < MAGIC_SUFFIX.len() {
            return Err(HarnessError::MessageTooShort(self.msg_size_bytes));
        }
        if self.runs == 0 {
            return Err(HarnessError::NoRuns);
        }
        if self.leaf_size == Some(0) {
            return Err(HarnessError::LeafSize);
        }
        if let Some(k) = self.kappa {
            if k == 0 || k % 8 != 0 {
                return Err(HarnessError::Kappa(k));
            }
        }
        Ok(())
    }

    pub fn step_limit(&self) -> u64 {
        self.step_limit.unwrap_or_else(|| {
            let n = self.n as u64;
            2_000_000 + 2_000 * n * n * n
        })
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size.unwrap_or(DEFAULT_LEAF_SIZE)
    }

    pub fn kappa(&self) -> usize {
        self.kappa.unwrap_or(DEFAULT_KAPPA)
    }

    /// Seed of the `i`-th run.
    pub fn run_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }

    fn sim_config(&self, seed: u64, record_trace: bool) -> SimConfig {
        SimConfig {
            scheduler: self.scheduler,
            adversary: self.adversary,
            step_limit: self.step_limit(),
            record_trace,
            ..SimConfig::new(self.n, self.t, seed)
        }
    }
}

/// Distinct predicate-valid inputs derived from the run seed.
pub fn random_inputs(n: usize, msg_size: usize, seed: u64) -> Vec<Bytes> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x696e_7075_7473);
    (0..n)
        .map(|_| {
            let mut v = vec![0u8; msg_size];
            let body = msg_size - MAGIC_SUFFIX.len();
            rng.fill(&mut v[..body]);
            v[body..].copy_from_slice(&MAGIC_SUFFIX);
            Bytes::from(v)
        })
        .collect()
}

fn mvba_id(seed: u64) -> Bytes {
    Bytes::from(format!("mvba-{seed}"))
}

/// Execute one run and audit it; audit findings are appended to the
/// metrics' violations.
pub fn simulate(scenario: &Scenario, seed: u64, record_trace: bool) -> Result<RunOutcome, HarnessError> {
    scenario.validate()?;
    let (n, t) = (scenario.n, scenario.t);
    let cfg = scenario.sim_config(seed, record_trace);
    let inputs = random_inputs(n, scenario.msg_size_bytes, seed);
    let predicate = Predicate::MagicSuffix;
    let id = mvba_id(seed);
    let mut outcome;
    let violations = match scenario.protocol {
        Protocol::Rmvba => {
            let tree = Arc::new(NetworkTree::build(n, scenario.leaf_size()));
            let params = RmvbaParams { mvba_id: id, predicate };
            let factory = {
                let tree = tree.clone();
                move |me: NodeId, input: Bytes| -> Box<dyn Machine> {
                    Box::new(RmvbaNode::new(me, tree.clone(), params.clone(), input))
                }
            };
            outcome = netsim::run(&cfg, &inputs, &factory)?;
            let thresholds = |tag: &ProtocolTag| tree.group(tag.group).map_or((n, t), |g| (g.size(), g.t()));
            outcome.metrics.chain_coins = (0..n)
                .map(|slot| {
                    tree.chain(NodeId::from_slot(slot))
                        .iter()
                        .map(|g| outcome.coins_by_group.get(g).copied().unwrap_or(0))
                        .sum()
                })
                .max();
            let corrupted = outcome.corrupted.clone();
            let good = |tag: &ProtocolTag| {
                tree.group(tag.group)
                    .is_some_and(|g| g.members().iter().filter(|id| corrupted.contains(id)).count() <= g.t())
            };
            let ctx = AuditContext {
                predicate,
                n,
                t,
                thresholds: &thresholds,
                good: &good,
                tree: Some(&tree),
            };
            audit_run(&outcome, &ctx)
        }
        Protocol::Rr | Protocol::Hash => {
            let params = FlatParams {
                mvba_id: id,
                n,
                t,
                predicate,
                kappa: scenario.kappa(),
            };
            let hash = scenario.protocol == Protocol::Hash;
            let factory = move |me: NodeId, input: Bytes| -> Box<dyn Machine> {
                if hash {
                    Box::new(HashNode::new(params.clone(), me, input))
                } else {
                    Box::new(RrNode::new(params.clone(), input))
                }
            };
            outcome = netsim::run(&cfg, &inputs, &factory)?;
            let thresholds = |_: &ProtocolTag| (n, t);
            let ctx = AuditContext {
                predicate,
                n,
                t,
                thresholds: &thresholds,
                good: &|_| true,
                tree: None,
            };
            audit_run(&outcome, &ctx)
        }
    };
    outcome.metrics.violations.extend(violations);
    Ok(outcome)
}

/// One row of a campaign report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub protocol: Protocol,
    pub n: usize,
    pub t: usize,
    pub msg_size_bytes: usize,
    pub adversary: AdversaryKind,
    pub scheduler: SchedulerKind,
    pub seed: u64,
    /// Commitment digest bits (only meaningful for the hash variant).
    pub kappa: usize,
    pub metrics: RunMetrics,
}

pub fn run_one(scenario: &Scenario, seed: u64) -> Result<RunRecord, HarnessError> {
    let outcome = simulate(scenario, seed, false)?;
    Ok(RunRecord {
        protocol: scenario.protocol,
        n: scenario.n,
        t: scenario.t,
        msg_size_bytes: scenario.msg_size_bytes,
        adversary: scenario.adversary,
        scheduler: scenario.scheduler,
        seed,
        kappa: scenario.kappa(),
        metrics: outcome.metrics,
    })
}

/// Aggregates over the runs sharing protocol, `n`, `t` and message size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub protocol: Protocol,
    pub n: usize,
    pub t: usize,
    pub msg_size_bytes: usize,
    pub kappa: usize,
    pub runs: usize,
    pub mean_bits: f64,
    pub max_bits: u64,
    pub mean_msgs: f64,
    pub max_msgs: u64,
    pub mean_rounds: f64,
    pub max_rounds: u64,
    pub mean_coins: f64,
    pub max_coins: u64,
    /// Present for the tree protocol.
    pub mean_chain_coins: Option<f64>,
    pub max_chain_coins: Option<u64>,
    /// Present for the leader-based protocols.
    pub mean_election_rounds: Option<f64>,
    pub max_election_rounds: Option<u16>,
    pub violations: usize,
}

/// A least-squares constant for `y ≈ c·x` through the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub claim: Claim,
    pub coefficient: f64,
    /// `‖y − c·x‖ / ‖y‖`.
    pub relative_residual: f64,
    /// `(n, x, y)` per aggregate used.
    pub points: Vec<(usize, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub fits: Vec<Fit>,
    pub violations: usize,
}

impl CampaignReport {
    pub fn from_runs(runs: Vec<RunRecord>) -> Self {
        let aggregates = aggregate(&runs);
        let violations = runs.iter().filter(|r| !r.metrics.is_clean()).count();
        let mut report = CampaignReport {
            runs,
            aggregates,
            fits: Vec::new(),
            violations,
        };
        report.fits = Claim::ALL.into_iter().filter_map(|c| fit(&report, c).ok()).collect();
        report
    }

    /// Violation messages, one per line, prefixed by the run they came from.
    pub fn violation_lines(&self) -> Vec<String> {
        self.runs
            .iter()
            .flat_map(|r| {
                r.metrics.violations.iter().map(move |v| {
                    format!(
                        "{} n={} t={} adversary={} scheduler={:?} seed={}: {v}",
                        r.protocol,
                        r.n,
                        r.t,
                        r.adversary.name(),
                        r.scheduler,
                        r.seed
                    )
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-run table with one header row.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.runs {
            let m = &r.metrics;
            w.serialize(CsvRow {
                protocol: r.protocol.name(),
                n: r.n,
                t: r.t,
                msg_size_bytes: r.msg_size_bytes,
                adversary: r.adversary.name(),
                scheduler: r.scheduler.name(),
                seed: r.seed,
                total_bits: m.total_bits,
                total_msgs: m.total_msgs,
                rounds: m.rounds,
                coins: m.coins,
                chain_coins: m.chain_coins,
                elections: m.elections,
                election_rounds: m.election_rounds,
                steps: m.steps,
                violations: m.violations.len(),
            })?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Serialize)]
struct CsvRow {
    protocol: &'static str,
    n: usize,
    t: usize,
    msg_size_bytes: usize,
    adversary: &'static str,
    scheduler: &'static str,
    seed: u64,
    total_bits: u64,
    total_msgs: u64,
    rounds: u64,
    coins: u64,
    chain_coins: Option<u64>,
    elections: u64,
    election_rounds: Option<u16>,
    steps: u64,
    violations: usize,
}

fn aggregate(runs: &[RunRecord]) -> Vec<Aggregate> {
    type Key = (Protocol, usize, usize, usize, usize);
    let mut groups: BTreeMap<Key, Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        groups
            .entry((r.protocol, r.n, r.t, r.msg_size_bytes, r.kappa))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((protocol, n, t, msg_size_bytes, kappa), rs)| {
            let k = rs.len() as f64;
            let mean = |f: &dyn Fn(&RunMetrics) -> u64| rs.iter().map(|r| f(&r.metrics) as f64).sum::<f64>() / k;
            let max = |f: &dyn Fn(&RunMetrics) -> u64| rs.iter().map(|r| f(&r.metrics)).max().unwrap_or(0);
            let elections: Vec<u16> = rs.iter().filter_map(|r| r.metrics.election_rounds).collect();
            let mean_election_rounds = (!elections.is_empty())
                .then(|| elections.iter().map(|&x| x as f64).sum::<f64>() / elections.len() as f64);
            let chain: Vec<u64> = rs.iter().filter_map(|r| r.metrics.chain_coins).collect();
            let mean_chain_coins =
                (!chain.is_empty()).then(|| chain.iter().map(|&x| x as f64).sum::<f64>() / chain.len() as f64);
            Aggregate {
                protocol,
                n,
                t,
                msg_size_bytes,
                kappa,
                runs: rs.len(),
                mean_bits: mean(&|m| m.total_bits),
                max_bits: max(&|m| m.total_bits),
                mean_msgs: mean(&|m| m.total_msgs),
                max_msgs: max(&|m| m.total_msgs),
                mean_rounds: mean(&|m| m.rounds),
                max_rounds: max(&|m| m.rounds),
                mean_coins: mean(&|m| m.coins),
                max_coins: max(&|m| m.coins),
                mean_chain_coins,
                max_chain_coins: chain.iter().copied().max(),
                mean_election_rounds,
                max_election_rounds: elections.iter().copied().max(),
                violations: rs.iter().filter(|r| !r.metrics.is_clean()).count(),
            }
        })
        .collect()
}

/// Run every scenario's runs in parallel; results keep scenario and seed order.
pub fn run_campaign(scenarios: &[Scenario]) -> Result<CampaignReport, HarnessError> {
    for s in scenarios {
        s.validate()?;
    }
    let jobs: Vec<(&Scenario, u64)> = scenarios
        .iter()
        .flat_map(|s| (0..s.runs).map(move |i| (s, s.run_seed(i))))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|(s, seed)| run_one(s, *seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CampaignReport::from_runs(runs))
}

/// A cross product of scenario parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub protocols: Vec<Protocol>,
    /// `(n, t)` pairs; pairs violating a protocol's resilience are skipped.
    pub sizes: Vec<(usize, usize)>,
    pub msg_size_bytes: usize,
    #[serde(default = "all_adversaries")]
    pub adversaries: Vec<AdversaryKind>,
    #[serde(default = "default_schedulers")]
    pub schedulers: Vec<SchedulerKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub step_limit: Option<u64>,
    #[serde(default)]
    pub leaf_size: Option<usize>,
    #[serde(default)]
    pub kappa: Option<usize>,
}

fn all_adversaries() -> Vec<AdversaryKind> {
    AdversaryKind::ALL.to_vec()
}

fn default_schedulers() -> Vec<SchedulerKind> {
    vec![default_scheduler()]
}

impl Grid {
    pub fn expand(&self) -> Vec<Scenario> {
        let mut out = Vec::new();
        for &protocol in &self.protocols {
            for &(n, t) in &self.sizes {
                if t > protocol.max_faults(n) {
                    continue;
                }
                for &adversary in &self.adversaries {
                    for &scheduler in &self.schedulers {
                        out.push(Scenario {
                            protocol,
                            n,
                            t,
                            msg_size_bytes: self.msg_size_bytes,
                            seed: self.seed,
                            adversary,
                            scheduler,
                            runs: self.runs,
                            step_limit: self.step_limit,
                            leaf_size: self.leaf_size,
                            kappa: self.kappa,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Campaign configuration file: explicit scenarios, a grid, or both.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub grid: Option<Grid>,
}

impl CampaignConfig {
    pub fn scenarios(&self) -> Vec<Scenario> {
        let mut out = self.scenarios.clone();
        if let Some(g) = &self.grid {
            out.extend(g.expand());
        }
        out
    }
}

/// A complexity expression checked against campaign measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Bits against `n|w|log n + n² log q`.
    RmvbaBits,
    /// Rounds against `log n`.
    RmvbaRounds,
    /// Coins against `log n`.
    RmvbaCoins,
    /// Coins on the busiest root-to-leaf chain against `log n`.
    RmvbaChainCoins,
    /// Bits against `n|w| + n² log n`.
    RrBits,
    /// Bits against `n|w| + κn³`.
    HashBits,
}

impl Claim {
    pub const ALL: [Claim; 6] = [
        Claim::RmvbaBits,
        Claim::RmvbaRounds,
        Claim::RmvbaCoins,
        Claim::RmvbaChainCoins,
        Claim::RrBits,
        Claim::HashBits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::RmvbaBits => "rmvba-bits",
            Claim::RmvbaRounds => "rmvba-rounds",
            Claim::RmvbaCoins => "rmvba-coins",
            Claim::RmvbaChainCoins => "rmvba-chain-coins",
            Claim::RrBits => "rr-bits",
            Claim::HashBits => "hash-bits",
        }
    }

    pub fn protocol(self) -> Protocol {
        match self {
            Claim::RmvbaBits | Claim::RmvbaRounds | Claim::RmvbaCoins | Claim::RmvbaChainCoins => Protocol::Rmvba,
            Claim::RrBits => Protocol::Rr,
            Claim::HashBits => Protocol::Hash,
        }
    }

    /// The expression's value; `w_bits` is the message length in bits.
    pub fn expression(self, n: usize, w_bits: f64, kappa: f64) -> f64 {
        let nf = n as f64;
        let log_n = nf.log2();
        match self {
            Claim::RmvbaBits => nf * w_bits * log_n + nf * nf * LOG_Q,
            Claim::RmvbaRounds | Claim::RmvbaCoins | Claim::RmvbaChainCoins => log_n,
            Claim::RrBits => nf * w_bits + nf * nf * log_n,
            Claim::HashBits => nf * w_bits + kappa * nf * nf * nf,
        }
    }

    fn measured(self, a: &Aggregate) -> f64 {
        match self {
            Claim::RmvbaRounds => a.mean_rounds,
            Claim::RmvbaCoins => a.mean_coins,
            Claim::RmvbaChainCoins => a.mean_chain_coins.unwrap_or(0.0),
            _ => a.mean_bits,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::UnknownName(s.to_string()))
    }
}

/// Least-squares `c` for `y ≈ c·x` and the relative residual.
pub fn fit_points(points: &[(f64, f64)]) -> (f64, f64) {
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let res: f64 = points.iter().map(|(x, y)| (y - c * x).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = points.iter().map(|(_, y)| y * y).sum::<f64>().sqrt();
    (c, if norm > 0.0 { res / norm } else { 0.0 })
}

/// Fit a claim over the report's aggregates of the claim's protocol.
pub fn fit(report: &CampaignReport, claim: Claim) -> Result<Fit, HarnessError> {
    let protocol = claim.protocol();
    let aggs: Vec<&Aggregate> = report.aggregates.iter().filter(|a| a.protocol == protocol).collect();
    if aggs.is_empty() {
        return Err(HarnessError::NoData { claim, protocol });
    }
    let sizes: BTreeSet<usize> = aggs.iter().map(|a| a.n).collect();
    if sizes.len() < 3 {
        return Err(HarnessError::TooFewSizes(sizes.len()));
    }
    let points: Vec<(usize, f64, f64)> = aggs
        .iter()
        .map(|a| {
            let x = claim.expression(a.n, 8.0 * a.msg_size_bytes as f64, a.kappa as f64);
            (a.n, x, claim.measured(a))
        })
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|&(_, x, y)| (x, y)).collect();
    let (coefficient, relative_residual) = fit_points(&xy);
    Ok(Fit {
        claim,
        coefficient,
        relative_residual,
        points,
    })
}
