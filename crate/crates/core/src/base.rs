//! Base-case validated agreement for small groups.
//!
//! Every member reliably broadcasts its input; one binary agreement per
//! member decides whose broadcast counts. A node votes 1 for a member once
//! it delivered a valid value from it, and 0 for everyone else after `m−t`
//! agreements decided 1. The output is the value of the lowest position
//! whose agreement decided 1.

use bytes::Bytes;

use crate::aba::Aba;
use crate::machine::{Outbox, RepeatedInput};
use crate::rbc::Rbc;
use crate::tree::Group;
use crate::types::{NodeId, Predicate, ProtocolTag, Sub};
use crate::wire::Payload;

#[derive(Clone, Debug)]
pub struct BaseMvba {
    group: Group,
    predicate: Predicate,
    rbcs: Vec<Rbc>,
    abas: Vec<Aba>,
    input: Option<Bytes>,
    zeros_sent: bool,
    output: Option<Bytes>,
}

impl BaseMvba {
    /// Instances are tagged `(mvba_id, g, Member(pos))`.
    pub fn new(mvba_id: Bytes, g: u32, group: Group, predicate: Predicate) -> Self {
        let mut rbcs = Vec::with_capacity(group.size());
        let mut abas = Vec::with_capacity(group.size());
        for pos in 1..=group.size() {
            let tag = ProtocolTag::new(mvba_id.clone(), g, Sub::Member(pos as u16));
            rbcs.push(Rbc::new(tag.clone(), group.clone(), group.at(pos)));
            abas.push(Aba::new(tag, group.clone()));
        }
        BaseMvba {
            group,
            predicate,
            rbcs,
            abas,
            input: None,
            zeros_sent: false,
            output: None,
        }
    }

    pub fn output(&self) -> Option<&Bytes> {
        self.output.as_ref()
    }

    pub fn input(&mut self, w: Bytes, out: &mut Outbox) -> Result<(), RepeatedInput> {
        if self.input.is_some() {
            return Err(RepeatedInput);
        }
        self.input = Some(w.clone());
        if let Some(pos) = self.group.position(out.me()) {
            self.rbcs[pos - 1].broadcast(w, out);
        }
        Ok(())
    }

    /// Frame for member instance `pos`; returns the output once produced.
    pub fn handle(&mut self, from: NodeId, pos: u16, payload: &Payload, out: &mut Outbox) -> Option<Bytes> {
        let i = (pos as usize).checked_sub(1).filter(|&i| i < self.group.size())?;
        match payload {
            Payload::RbcSend(_) | Payload::RbcEcho(_) | Payload::RbcReady(_) => {
                if let Some(v) = self.rbcs[i].handle(from, payload, out) {
                    if self.predicate.check(&v) && !self.abas[i].has_input() {
                        let _ = self.abas[i].input(true, out);
                    }
                }
            }
            _ => {
                self.abas[i].handle(from, payload, out);
            }
        }
        self.progress(out)
    }

    pub fn on_coin(&mut self, pos: u16, round: u16, value: bool, out: &mut Outbox) -> Option<Bytes> {
        let i = (pos as usize).checked_sub(1).filter(|&i| i < self.group.size())?;
        self.abas[i].on_coin(round, value, out);
        self.progress(out)
    }

    fn progress(&mut self, out: &mut Outbox) -> Option<Bytes> {
        if self.output.is_some() {
            return None;
        }
        let ones = self.abas.iter().filter(|a| a.decided() == Some(true)).count();
        if !self.zeros_sent && ones >= self.group.size() - self.group.t() {
            self.zeros_sent = true;
            for a in self.abas.iter_mut().filter(|a| !a.has_input()) {
                let _ = a.input(false, out);
            }
        }
        if self.abas.iter().any(|a| a.decided().is_none()) {
            return None;
        }
        let i = self.abas.iter().position(|a| a.decided() == Some(true))?;
        let v = self.rbcs[i].delivered()?.clone();
        if !self.predicate.check(&v) {
            return None;
        }
        self.output = Some(v.clone());
        Some(v)
    }
}
