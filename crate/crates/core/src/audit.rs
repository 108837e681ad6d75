//! Post-run checks over the facts recorded by honest machines.
//!
//! Every check returns human-readable violation strings prefixed with the
//! property name; an empty list means the run satisfied the property. Facts
//! are only recorded while a node is honest, so a node corrupted late in an
//! adaptive run still counts for what it did before corruption.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;

use crate::machine::Fact;
use crate::metrics::StampedFact;
use crate::netsim::RunOutcome;
use crate::tree::NetworkTree;
use crate::types::{NodeId, Predicate, ProtocolTag, Sub};

/// Group size and fault threshold of the instance behind a tag.
pub type Thresholds<'a> = dyn Fn(&ProtocolTag) -> (usize, usize) + 'a;

/// Whether the group behind a tag holds at most its threshold of corrupted
/// members. Sub-protocol guarantees only hold in such groups.
pub type GoodGroup<'a> = dyn Fn(&ProtocolTag) -> bool + 'a;

/// Which audits apply to a run.
pub struct AuditContext<'a> {
    pub predicate: Predicate,
    pub n: usize,
    pub t: usize,
    pub thresholds: &'a Thresholds<'a>,
    pub good: &'a GoodGroup<'a>,
    /// Present for tree-based runs; enables the good-chain and dispersal checks.
    pub tree: Option<&'a NetworkTree>,
}

/// All applicable checks.
pub fn audit_run(outcome: &RunOutcome, ctx: &AuditContext) -> Vec<String> {
    let facts = &outcome.facts;
    let mut v = Vec::new();
    v.extend(agreement(facts));
    v.extend(external_validity(facts, ctx.predicate));
    v.extend(round_agreement(facts));
    let scoped: Vec<StampedFact> = facts.iter().filter(|f| in_good_group(f, ctx.good)).cloned().collect();
    v.extend(abbba(&scoped, ctx.thresholds));
    v.extend(aba(&scoped));
    v.extend(rba(&scoped, ctx.thresholds));
    v.extend(aba_one_needs_vote(&scoped));
    if let Some(tree) = ctx.tree {
        v.extend(shmdm_validity(facts, tree, &outcome.corrupted));
        if outcome.corrupted.len() <= ctx.t && tree.good_chain(&outcome.corrupted).is_none() {
            v.push(format!(
                "good-chain: none for corrupted set {:?}",
                ids(&outcome.corrupted)
            ));
        }
    }
    v.extend(acd_integrity(facts, ctx.n, ctx.t));
    v
}

fn in_good_group(f: &StampedFact, good: &GoodGroup) -> bool {
    match &f.fact {
        Fact::AbbbaInput { tag, .. }
        | Fact::AbbbaOutput { tag, .. }
        | Fact::AbaInput { tag, .. }
        | Fact::AbaDecided { tag, .. }
        | Fact::RbaSecondIndicator { tag, .. }
        | Fact::RbaInput { tag, .. }
        | Fact::RbaVote { tag, .. }
        | Fact::RbaOutput { tag, .. }
        | Fact::ShmdmOutput { tag, .. } => good(tag),
        _ => true,
    }
}

fn ids(set: &BTreeSet<NodeId>) -> Vec<u16> {
    set.iter().map(|id| id.0).collect()
}

fn short(v: &[u8]) -> String {
    let h = hex::encode(&v[..v.len().min(8)]);
    format!("{h}..({} bytes)", v.len())
}

/// All honest top-level decisions are equal.
pub fn agreement(facts: &[StampedFact]) -> Vec<String> {
    let decided: BTreeMap<NodeId, &Bytes> = facts
        .iter()
        .filter_map(|f| match &f.fact {
            Fact::Decided { value } => Some((f.node, value)),
            _ => None,
        })
        .collect();
    let values: BTreeSet<&Bytes> = decided.values().copied().collect();
    if values.len() > 1 {
        let shown: Vec<String> = values.iter().map(|v| short(v)).collect();
        vec![format!(
            "agreement: honest nodes decided {} values: {}",
            values.len(),
            shown.join(", ")
        )]
    } else {
        Vec::new()
    }
}

/// Every honest decision satisfies the predicate.
pub fn external_validity(facts: &[StampedFact], predicate: Predicate) -> Vec<String> {
    facts
        .iter()
        .filter_map(|f| match &f.fact {
            Fact::Decided { value } if !predicate.check(value) => {
                Some(format!("external-validity: {} decided {}", f.node, short(value)))
            }
            _ => None,
        })
        .collect()
}

/// Leader-based variants: every honest node decides in the same election round.
pub fn round_agreement(facts: &[StampedFact]) -> Vec<String> {
    let rounds: BTreeSet<u16> = facts
        .iter()
        .filter_map(|f| match f.fact {
            Fact::DecidedInRound { round } => Some(round),
            _ => None,
        })
        .collect();
    if rounds.len() > 1 {
        vec![format!("round-agreement: decisions in rounds {rounds:?}")]
    } else {
        Vec::new()
    }
}

/// Biased validity and biased integrity of every biased binary agreement.
pub fn abbba(facts: &[StampedFact], thresholds: &Thresholds) -> Vec<String> {
    #[derive(Default)]
    struct Inst {
        a: BTreeSet<NodeId>,
        b: BTreeSet<NodeId>,
        out0: Vec<NodeId>,
        out1: Vec<NodeId>,
    }
    let mut inst: BTreeMap<&ProtocolTag, Inst> = BTreeMap::new();
    for f in facts {
        match &f.fact {
            Fact::AbbbaInput { tag, a, b } => {
                let e = inst.entry(tag).or_default();
                if *a {
                    e.a.insert(f.node);
                }
                if *b {
                    e.b.insert(f.node);
                }
            }
            Fact::AbbbaOutput { tag, bit } => {
                let e = inst.entry(tag).or_default();
                if *bit {
                    e.out1.push(f.node);
                } else {
                    e.out0.push(f.node);
                }
            }
            _ => {}
        }
    }
    let mut v = Vec::new();
    for (tag, i) in inst {
        let (_, t) = thresholds(tag);
        if i.b.len() > t && !i.out0.is_empty() {
            v.push(format!(
                "abbba-validity: {tag}: {} honest b=1 inputs but {} output 0",
                i.b.len(),
                i.out0[0]
            ));
        }
        if !i.out1.is_empty() && i.a.is_empty() && i.b.is_empty() {
            v.push(format!("abbba-integrity: {tag}: output 1 without any honest 1 input"));
        }
    }
    v
}

/// Agreement and validity of every binary agreement.
pub fn aba(facts: &[StampedFact]) -> Vec<String> {
    let mut inputs: BTreeMap<&ProtocolTag, [bool; 2]> = BTreeMap::new();
    let mut decided: BTreeMap<&ProtocolTag, BTreeSet<bool>> = BTreeMap::new();
    for f in facts {
        match &f.fact {
            Fact::AbaInput { tag, bit } => inputs.entry(tag).or_default()[*bit as usize] = true,
            Fact::AbaDecided { tag, bit } => {
                decided.entry(tag).or_default().insert(*bit);
            }
            _ => {}
        }
    }
    let mut v = Vec::new();
    for (tag, bits) in decided {
        if bits.len() > 1 {
            v.push(format!("aba-agreement: {tag}: honest nodes decided both bits"));
        }
        let seen = inputs.get(tag).copied().unwrap_or_default();
        for b in bits {
            if !seen[b as usize] {
                v.push(format!(
                    "aba-validity: {tag}: decided {} with no honest input {}",
                    b as u8, b as u8
                ));
            }
        }
    }
    v
}

/// Unique agreement, the vote quorum bound (a vote of 1 needs `m - 2t`
/// honest second indicators) and output consistency of every reliable agreement.
pub fn rba(facts: &[StampedFact], thresholds: &Thresholds) -> Vec<String> {
    #[derive(Default)]
    struct Inst<'f> {
        second: BTreeMap<NodeId, &'f Bytes>,
        voted_one: Option<NodeId>,
        outputs: BTreeSet<&'f Bytes>,
        bottom: Option<NodeId>,
    }
    let mut inst: BTreeMap<&ProtocolTag, Inst> = BTreeMap::new();
    for f in facts {
        match &f.fact {
            Fact::RbaSecondIndicator { tag, value } => {
                inst.entry(tag).or_default().second.insert(f.node, value);
            }
            Fact::RbaVote { tag, vote: true } => {
                inst.entry(tag).or_default().voted_one.get_or_insert(f.node);
            }
            Fact::RbaOutput { tag, value } => {
                let e = inst.entry(tag).or_default();
                match value {
                    Some(w) => {
                        e.outputs.insert(w);
                    }
                    None => {
                        e.bottom.get_or_insert(f.node);
                    }
                }
            }
            _ => {}
        }
    }
    let mut v = Vec::new();
    for (tag, i) in inst {
        let (m, t) = thresholds(tag);
        let held: BTreeSet<&Bytes> = i.second.values().copied().collect();
        if held.len() > 1 {
            v.push(format!(
                "rba-unique: {tag}: second indicator set on {} values",
                held.len()
            ));
        }
        if let Some(node) = i.voted_one {
            if i.second.len() + 2 * t < m {
                v.push(format!(
                    "rba-vote: {tag}: {node} voted 1 with only {} honest second indicators (need {})",
                    i.second.len(),
                    m - 2 * t
                ));
            }
        }
        if i.outputs.len() > 1 {
            v.push(format!("rba-consistency: {tag}: {} distinct outputs", i.outputs.len()));
        }
        if let (Some(node), Some(_)) = (i.bottom, i.voted_one) {
            v.push(format!(
                "rba-consistency: {tag}: {node} output bottom after an honest vote for 1"
            ));
        }
    }
    v
}

/// Reliable agreement validity, for runs where every honest member input
/// the same value: each such instance outputs that value.
pub fn rba_validity(facts: &[StampedFact], honest_members: usize) -> Vec<String> {
    let mut inputs: BTreeMap<&ProtocolTag, BTreeSet<(NodeId, &Bytes)>> = BTreeMap::new();
    let mut outputs: BTreeMap<&ProtocolTag, Vec<(NodeId, &Option<Bytes>)>> = BTreeMap::new();
    for f in facts {
        match &f.fact {
            Fact::RbaInput { tag, value } => {
                inputs.entry(tag).or_default().insert((f.node, value));
            }
            Fact::RbaOutput { tag, value } => outputs.entry(tag).or_default().push((f.node, value)),
            _ => {}
        }
    }
    let mut v = Vec::new();
    for (tag, ins) in inputs {
        let values: BTreeSet<&Bytes> = ins.iter().map(|(_, w)| *w).collect();
        if ins.len() < honest_members || values.len() != 1 {
            continue;
        }
        let w = values.into_iter().next().unwrap();
        for (node, out) in outputs.get(tag).map(Vec::as_slice).unwrap_or_default() {
            if out.as_ref() != Some(w) {
                v.push(format!(
                    "rba-validity: {tag}: {node} did not output the unanimous input"
                ));
            }
        }
    }
    v
}

/// A binary agreement deciding 1 on a half requires an honest vote for 1 in
/// that half's reliable agreement.
pub fn aba_one_needs_vote(facts: &[StampedFact]) -> Vec<String> {
    let mut voted: BTreeSet<ProtocolTag> = BTreeSet::new();
    for f in facts {
        if let Fact::RbaVote { tag, vote: true } = &f.fact {
            voted.insert(tag.clone());
        }
    }
    let mut reported = BTreeSet::new();
    let mut v = Vec::new();
    for f in facts {
        if let Fact::AbaDecided { tag, bit: true } = &f.fact {
            let Sub::Election(e) = tag.sub else { continue };
            let Ok(l) = u8::try_from(e) else { continue };
            let rba_tag = tag.with_sub(Sub::Subset(l));
            if !voted.contains(&rba_tag) && reported.insert(tag.clone()) {
                v.push(format!(
                    "aba-needs-vote: {tag}: decided 1 without an honest vote for 1 in {rba_tag}"
                ));
            }
        }
    }
    v
}

/// Dispersal validity: when the sending half is good, every honest output of
/// the dispersal equals the value the half's honest senders dispersed.
pub fn shmdm_validity(facts: &[StampedFact], tree: &NetworkTree, corrupted: &BTreeSet<NodeId>) -> Vec<String> {
    let mut outputs: BTreeMap<&ProtocolTag, BTreeSet<&Bytes>> = BTreeMap::new();
    for f in facts {
        if let Fact::ShmdmOutput { tag, value } = &f.fact {
            outputs.entry(tag).or_default().insert(value);
        }
    }
    let mut v = Vec::new();
    for (tag, values) in outputs {
        let Sub::Subset(l) = tag.sub else { continue };
        let Some(half) = tree.group(2 * tag.group + l as u32) else {
            continue;
        };
        let bad = half.members().iter().filter(|id| corrupted.contains(id)).count();
        if bad <= half.t() && values.len() > 1 {
            v.push(format!(
                "shmdm-validity: {tag}: good sending half but {} distinct outputs",
                values.len()
            ));
        }
    }
    v
}

/// At the first honest return of the dispersal phase, at least `n - 2t`
/// honest dealers have completed their own dispersal.
pub fn acd_integrity(facts: &[StampedFact], n: usize, t: usize) -> Vec<String> {
    let Some(first) = facts.iter().find(|f| matches!(f.fact, Fact::AcdReturned)) else {
        return Vec::new();
    };
    let complete: BTreeSet<NodeId> = facts
        .iter()
        .take_while(|f| f.step <= first.step)
        .filter(|f| matches!(f.fact, Fact::AcdComplete))
        .map(|f| f.node)
        .collect();
    if complete.len() + 2 * t < n {
        vec![format!(
            "acd-integrity: {} returned at step {} with {} honest completed dispersals (need {})",
            first.node,
            first.step,
            complete.len(),
            n - 2 * t
        )]
    } else {
        Vec::new()
    }
}
