//! Per-run metric records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::machine::Fact;
use crate::types::NodeId;

/// Measurements of one simulated execution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Bits of every envelope sent by a node honest at send time.
    pub total_bits: u64,
    pub total_msgs: u64,
    /// Longest causal chain of honest message hops up to the last decision.
    pub rounds: u64,
    /// Coin instances resolved (binary and election).
    pub coins: u64,
    /// Election coin instances resolved.
    pub elections: u64,
    /// Largest number of coins resolved in the groups of one node's chain (tree protocols).
    pub chain_coins: Option<u64>,
    /// Largest election round in which an honest node decided, if the protocol elects leaders.
    pub election_rounds: Option<u16>,
    /// Network deliveries performed.
    pub steps: u64,
    /// Decided value (hex) per honest node.
    pub decided: BTreeMap<u16, String>,
    pub violations: Vec<String>,
    /// SHA-256 over the delivery trace.
    pub trace_digest: String,
}

impl RunMetrics {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A fact recorded by `node` while processing delivery number `step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StampedFact {
    pub step: u64,
    pub node: NodeId,
    pub fact: Fact,
}

/// One delivery in the optional trace dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub from: u16,
    pub to: u16,
    pub kind: String,
    pub tag: String,
    pub bits: u64,
    pub depth: u32,
}
