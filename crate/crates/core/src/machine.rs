//! Interface between protocol state machines and the simulator.

use std::collections::VecDeque;

use bytes::Bytes;
use thiserror::Error;

use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

/// A one-shot input was provided twice.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("input already provided")]
pub struct RepeatedInput;

/// What a coin instance is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoinPurpose {
    /// Leader election, value in `[1..range]`.
    Election,
    /// Binary coin of agreement round `r`, value in `{0,1}`.
    Binary(u16),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoinKey {
    pub tag: ProtocolTag,
    pub purpose: CoinPurpose,
}

/// An activation of a coin instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinRequest {
    pub key: CoinKey,
    /// Honest activations needed before the value is fixed.
    pub threshold: usize,
    /// Size of the value range.
    pub range: u32,
}

/// Observations recorded by honest machines for post-hoc audits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fact {
    /// A top-level decision.
    Decided {
        value: Bytes,
    },
    /// Election round in which the node decided.
    DecidedInRound {
        round: u16,
    },
    AbbbaInput {
        tag: ProtocolTag,
        a: bool,
        b: bool,
    },
    AbbbaOutput {
        tag: ProtocolTag,
        bit: bool,
    },
    AbaInput {
        tag: ProtocolTag,
        bit: bool,
    },
    AbaDecided {
        tag: ProtocolTag,
        bit: bool,
    },
    /// Reliable agreement: the node set its second success indicator to 1 holding `value`.
    RbaSecondIndicator {
        tag: ProtocolTag,
        value: Bytes,
    },
    RbaInput {
        tag: ProtocolTag,
        value: Bytes,
    },
    RbaVote {
        tag: ProtocolTag,
        vote: bool,
    },
    /// `None` is the default (bottom) output.
    RbaOutput {
        tag: ProtocolTag,
        value: Option<Bytes>,
    },
    ShmdmOutput {
        tag: ProtocolTag,
        value: Bytes,
    },
    /// The dealer's own dispersal reached its completion quorum.
    AcdComplete,
    AcdReturned,
}

/// Effects produced by a machine while handling one event.
#[derive(Debug)]
pub struct Outbox {
    me: NodeId,
    local: VecDeque<(ProtocolTag, Payload)>,
    pub(crate) network: Vec<(NodeId, ProtocolTag, Payload)>,
    pub(crate) coins: Vec<CoinRequest>,
    pub(crate) facts: Vec<Fact>,
}

impl Outbox {
    pub fn new(me: NodeId) -> Self {
        Outbox {
            me,
            local: VecDeque::new(),
            network: Vec::new(),
            coins: Vec::new(),
            facts: Vec::new(),
        }
    }

    pub fn me(&self) -> NodeId {
        self.me
    }

    pub fn send(&mut self, to: NodeId, tag: ProtocolTag, payload: Payload) {
        if to == self.me {
            self.local.push_back((tag, payload));
        } else {
            self.network.push((to, tag, payload));
        }
    }

    pub fn multicast(&mut self, to: &[NodeId], tag: &ProtocolTag, payload: Payload) {
        for &j in to {
            self.send(j, tag.clone(), payload.clone());
        }
    }

    pub fn coin(&mut self, key: CoinKey, threshold: usize, range: u32) {
        self.coins.push(CoinRequest { key, threshold, range });
    }

    pub fn fact(&mut self, fact: Fact) {
        self.facts.push(fact);
    }

    pub(crate) fn next_local(&mut self) -> Option<(ProtocolTag, Payload)> {
        self.local.pop_front()
    }

    pub fn network_sends(&self) -> &[(NodeId, ProtocolTag, Payload)] {
        &self.network
    }

    pub fn coin_requests(&self) -> &[CoinRequest] {
        &self.coins
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }
}

/// A per-node protocol state machine, advanced only by delivered events.
pub trait Machine: Send {
    /// Deliver the node's input.
    fn start(&mut self, out: &mut Outbox);

    fn handle(&mut self, from: NodeId, tag: &ProtocolTag, payload: &Payload, out: &mut Outbox);

    fn on_coin(&mut self, key: &CoinKey, value: u32, out: &mut Outbox);

    /// The node's decided output, once any.
    fn decision(&self) -> Option<&Bytes>;

    /// Election round of the decision, for protocols that elect leaders.
    fn decision_round(&self) -> Option<u16> {
        None
    }
}

/// Run one event through `m` and then drain self-addressed messages, which
/// are delivered locally in FIFO order without touching the network.
pub fn drive<F>(m: &mut dyn Machine, me: NodeId, first: F) -> Outbox
where
    F: FnOnce(&mut dyn Machine, &mut Outbox),
{
    let mut out = Outbox::new(me);
    first(m, &mut out);
    while let Some((tag, payload)) = out.next_local() {
        m.handle(me, &tag, &payload, &mut out);
    }
    out
}
