//! Reliable agreement on a long value with a default bottom output.
//!
//! Nodes cross-check each other's coded rows (SYMBOL), publish two rounds of
//! success indicators, and vote on whether a common value exists (READY). A
//! node outputs bottom once `2t+1` nodes are ready for 0. Otherwise, once a
//! vote for 1 or an external decision bit arrives, nodes that already hold
//! the agreed value output it and the others rebuild it from corrected
//! symbols with online error correction.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;

use crate::codec::{oec_try_decode, Codec, OecOutcome, SymbolMap};
use crate::machine::{Fact, Outbox, RepeatedInput};
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

/// Something the caller must react to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RbaEvent {
    /// The node's own vote was set from the second indicators.
    Vote(bool),
    /// Final output; `None` is bottom.
    Output(Option<Bytes>),
}

/// Code dimension `⌊t/5⌋ + 1` for a group with fault threshold `t`.
pub fn rba_dimension(t: usize) -> usize {
    t / 5 + 1
}

#[derive(Clone, Debug, Default)]
struct Indicators {
    seen: BTreeSet<NodeId>,
    /// Senders of 1 not yet classified by the cross-check.
    pending: BTreeSet<NodeId>,
    ones: BTreeSet<NodeId>,
    zeros: BTreeSet<NodeId>,
    /// Every sender of 1, however it was classified.
    raw_ones: BTreeSet<NodeId>,
    sent: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Rba {
    tag: ProtocolTag,
    group: Group,
    me: NodeId,
    codec: Codec,
    input: Option<Bytes>,
    row: Option<Vec<Bytes>>,
    /// First SYMBOL from each sender: `(theirs, mine)`.
    symbols: BTreeMap<NodeId, (Bytes, Bytes)>,
    match_ok: BTreeSet<NodeId>,
    match_bad: BTreeSet<NodeId>,
    si1: Indicators,
    si2: Indicators,
    second_ok: bool,
    vote: Option<bool>,
    ready_from: BTreeSet<NodeId>,
    ready: [usize; 2],
    ready_sent: bool,
    phase3: bool,
    correct_sent: bool,
    correct_from: BTreeSet<NodeId>,
    correct: SymbolMap,
    output: Option<Option<Bytes>>,
    halted: bool,
}

impl Rba {
    pub fn new(tag: ProtocolTag, group: Group, me: NodeId) -> Self {
        let codec = Codec::new(group.size(), rba_dimension(group.t())).expect("group fits the code");
        Rba {
            tag,
            group,
            me,
            codec,
            input: None,
            row: None,
            symbols: BTreeMap::new(),
            match_ok: BTreeSet::new(),
            match_bad: BTreeSet::new(),
            si1: Indicators::default(),
            si2: Indicators::default(),
            second_ok: false,
            vote: None,
            ready_from: BTreeSet::new(),
            ready: [0, 0],
            ready_sent: false,
            phase3: false,
            correct_sent: false,
            correct_from: BTreeSet::new(),
            correct: SymbolMap::new(),
            output: None,
            halted: false,
        }
    }

    pub fn tag(&self) -> &ProtocolTag {
        &self.tag
    }

    pub fn output(&self) -> Option<&Option<Bytes>> {
        self.output.as_ref()
    }

    pub fn vote(&self) -> Option<bool> {
        self.vote
    }

    pub fn has_input(&self) -> bool {
        self.input.is_some()
    }

    pub fn input(&mut self, w: Bytes, out: &mut Outbox) -> Result<Vec<RbaEvent>, RepeatedInput> {
        if self.input.is_some() {
            return Err(RepeatedInput);
        }
        out.fact(Fact::RbaInput {
            tag: self.tag.clone(),
            value: w.clone(),
        });
        let row = self.codec.encode(&w);
        self.input = Some(w);
        let mine = row[self.pos(self.me) - 1].clone();
        if !self.halted {
            for (p, &j) in self.group.members().iter().enumerate() {
                out.send(
                    j,
                    self.tag.clone(),
                    Payload::Symbol {
                        theirs: row[p].clone(),
                        mine: mine.clone(),
                    },
                );
            }
        }
        self.row = Some(row);
        let stored: Vec<NodeId> = self.symbols.keys().copied().collect();
        for j in stored {
            self.classify(j);
        }
        let mut ev = Vec::new();
        self.progress(out, &mut ev);
        Ok(ev)
    }

    /// External decision bit 1 moves the node to the output phase.
    pub fn decision_bit(&mut self, out: &mut Outbox) -> Vec<RbaEvent> {
        let mut ev = Vec::new();
        if !self.halted {
            self.phase3 = true;
            self.progress(out, &mut ev);
        }
        ev
    }

    pub fn handle(&mut self, from: NodeId, payload: &Payload, out: &mut Outbox) -> Vec<RbaEvent> {
        let mut ev = Vec::new();
        if self.halted || !self.group.contains(from) {
            return ev;
        }
        let t = self.group.t();
        match payload {
            Payload::Symbol { theirs, mine } => {
                if self.symbols.contains_key(&from) {
                    return ev;
                }
                self.symbols.insert(from, (theirs.clone(), mine.clone()));
                self.classify(from);
                self.collect_from_second(from);
            }
            Payload::Si1(b) => {
                if !self.si1.seen.insert(from) {
                    return ev;
                }
                if *b {
                    self.si1.raw_ones.insert(from);
                    self.si1.pending.insert(from);
                } else {
                    self.si1.zeros.insert(from);
                }
            }
            Payload::Si2(b) => {
                if !self.si2.seen.insert(from) {
                    return ev;
                }
                if *b {
                    self.si2.raw_ones.insert(from);
                    self.si2.pending.insert(from);
                    self.collect_from_second(from);
                } else {
                    self.si2.zeros.insert(from);
                }
            }
            Payload::RbaReady(b) => {
                if !self.ready_from.insert(from) {
                    return ev;
                }
                let v = *b as usize;
                self.ready[v] += 1;
                if self.ready[v] > t {
                    self.send_ready(*b, out);
                }
                if self.ready[v] > 2 * t {
                    if *b {
                        self.phase3 = true;
                    } else if self.output.is_none() {
                        self.output = Some(None);
                        self.halted = true;
                        out.fact(Fact::RbaOutput {
                            tag: self.tag.clone(),
                            value: None,
                        });
                        ev.push(RbaEvent::Output(None));
                        return ev;
                    }
                }
            }
            Payload::CorrectSymbol(y) => {
                if self.correct_from.insert(from) {
                    self.correct.entry(self.pos(from)).or_insert_with(|| y.clone());
                }
            }
            _ => return ev,
        }
        self.progress(out, &mut ev);
        ev
    }

    fn pos(&self, id: NodeId) -> usize {
        self.group.position(id).expect("member")
    }

    fn classify(&mut self, j: NodeId) {
        let Some(row) = &self.row else { return };
        let Some((theirs, mine)) = self.symbols.get(&j) else {
            return;
        };
        let i = self.group.position(self.me).expect("member");
        if *theirs == row[i - 1] && *mine == row[self.pos(j) - 1] {
            self.match_ok.insert(j);
        } else {
            self.match_bad.insert(j);
        }
    }

    /// A sender of SI2(1) contributes its own symbol to the correction set.
    fn collect_from_second(&mut self, j: NodeId) {
        if self.si2.raw_ones.contains(&j) {
            if let Some((_, mine)) = self.symbols.get(&j) {
                let p = self.pos(j);
                self.correct.entry(p).or_insert_with(|| mine.clone());
            }
        }
    }

    fn settle(ind: &mut Indicators, ok: &BTreeSet<NodeId>, bad: &BTreeSet<NodeId>) {
        let moved: Vec<NodeId> = ind
            .pending
            .iter()
            .copied()
            .filter(|j| ok.contains(j) || bad.contains(j))
            .collect();
        for j in moved {
            ind.pending.remove(&j);
            if ok.contains(&j) {
                ind.ones.insert(j);
            } else {
                ind.zeros.insert(j);
            }
        }
    }

    fn broadcast(&self, payload: Payload, out: &mut Outbox) {
        out.multicast(self.group.members(), &self.tag, payload);
    }

    fn send_ready(&mut self, v: bool, out: &mut Outbox) {
        if !self.ready_sent {
            self.ready_sent = true;
            self.broadcast(Payload::RbaReady(v), out);
        }
    }

    fn progress(&mut self, out: &mut Outbox, ev: &mut Vec<RbaEvent>) {
        if self.halted {
            return;
        }
        let m = self.group.size();
        let t = self.group.t();
        Self::settle(&mut self.si1, &self.match_ok, &self.match_bad);
        Self::settle(&mut self.si2, &self.match_ok, &self.match_bad);

        if self.si1.sent.is_none() && self.row.is_some() {
            if self.match_ok.len() >= m - t {
                self.si1.sent = Some(true);
                self.broadcast(Payload::Si1(true), out);
            } else if self.match_bad.len() > t {
                self.si1.sent = Some(false);
                self.broadcast(Payload::Si1(false), out);
            }
        }

        if self.si2.sent.is_none() {
            let second = if self.si1.sent == Some(false) || self.si1.zeros.len() > t {
                Some(false)
            } else if self.si1.sent == Some(true) && self.si1.ones.len() >= m - t {
                Some(true)
            } else {
                None
            };
            if let Some(b) = second {
                self.si2.sent = Some(b);
                if b {
                    self.second_ok = true;
                    out.fact(Fact::RbaSecondIndicator {
                        tag: self.tag.clone(),
                        value: self.input.clone().expect("input before indicators"),
                    });
                }
                self.broadcast(Payload::Si2(b), out);
            }
        }

        if self.vote.is_none() {
            let vote = if self.si2.ones.len() >= m - t {
                Some(true)
            } else if self.si2.zeros.len() >= m - t {
                Some(false)
            } else {
                None
            };
            if let Some(v) = vote {
                self.vote = Some(v);
                out.fact(Fact::RbaVote {
                    tag: self.tag.clone(),
                    vote: v,
                });
                ev.push(RbaEvent::Vote(v));
                self.send_ready(v, out);
            }
        }

        if !self.phase3 || self.output.is_some() && self.correct_sent {
            return;
        }
        if self.second_ok {
            if self.output.is_none() {
                self.finish(self.input.clone().expect("input before indicators"), out, ev);
            }
            return;
        }
        if !self.correct_sent {
            if let Some(y) = self.majority_symbol() {
                self.correct_sent = true;
                self.broadcast(Payload::CorrectSymbol(y), out);
            }
        }
        if self.correct_sent && self.output.is_none() {
            if let OecOutcome::Decoded(w) = oec_try_decode(&self.codec, t, &self.correct) {
                self.finish(w, out, ev);
            }
        }
    }

    /// A value for our own symbol reported by `t+1` senders of SI2(1).
    fn majority_symbol(&self) -> Option<Bytes> {
        let mut counts: BTreeMap<&Bytes, usize> = BTreeMap::new();
        for j in self.si2.raw_ones.iter() {
            if let Some((theirs, _)) = self.symbols.get(j) {
                let c = counts.entry(theirs).or_default();
                *c += 1;
                if *c > self.group.t() {
                    return Some(theirs.clone());
                }
            }
        }
        None
    }

    fn finish(&mut self, w: Bytes, out: &mut Outbox, ev: &mut Vec<RbaEvent>) {
        self.output = Some(Some(w.clone()));
        out.fact(Fact::RbaOutput {
            tag: self.tag.clone(),
            value: Some(w.clone()),
        });
        ev.push(RbaEvent::Output(Some(w)));
    }
}
