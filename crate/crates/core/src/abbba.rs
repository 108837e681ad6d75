//! Asynchronous biased binary agreement: one exchange of `(a, b)` pairs.

use std::collections::BTreeSet;

use crate::machine::{Fact, Outbox, RepeatedInput};
use crate::tree::Group;
use crate::types::{NodeId, ProtocolTag};
use crate::wire::Payload;

/// One biased binary agreement instance inside `group`.
///
/// Counters accumulate from creation, so values that arrive before the
/// local input are not lost.
#[derive(Clone, Debug)]
pub struct Abbba {
    tag: ProtocolTag,
    group: Group,
    input: Option<(bool, bool)>,
    seen: BTreeSet<NodeId>,
    count_a: usize,
    count_b: usize,
    count_c: usize,
    output: Option<bool>,
}

impl Abbba {
    pub fn new(tag: ProtocolTag, group: Group) -> Self {
        Abbba {
            tag,
            group,
            input: None,
            seen: BTreeSet::new(),
            count_a: 0,
            count_b: 0,
            count_c: 0,
            output: None,
        }
    }

    pub fn tag(&self) -> &ProtocolTag {
        &self.tag
    }

    pub fn output(&self) -> Option<bool> {
        self.output
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.count_a, self.count_b, self.count_c)
    }

    /// Provide the local pair; returns the output if it is now known.
    pub fn input(&mut self, a: bool, b: bool, out: &mut Outbox) -> Result<Option<bool>, RepeatedInput> {
        if self.input.is_some() {
            return Err(RepeatedInput);
        }
        self.input = Some((a, b));
        out.fact(Fact::AbbbaInput {
            tag: self.tag.clone(),
            a,
            b,
        });
        out.multicast(
            self.group.members(),
            &self.tag,
            Payload::AbbaValue { a: a as u8, b: b as u8 },
        );
        if a || b {
            return Ok(self.set_output(true, out));
        }
        Ok(self.evaluate(out))
    }

    /// Count a value from `from`; returns a newly produced output.
    pub fn on_value(&mut self, from: NodeId, a: u8, b: u8, out: &mut Outbox) -> Option<bool> {
        if a > 1 || b > 1 || !self.group.contains(from) || !self.seen.insert(from) {
            return None;
        }
        self.count_a += a as usize;
        self.count_b += b as usize;
        if b == 0 {
            self.count_c += 1;
        }
        self.evaluate(out)
    }

    fn evaluate(&mut self, out: &mut Outbox) -> Option<bool> {
        if self.input.is_none() || self.output.is_some() {
            return None;
        }
        let t = self.group.t();
        let m = self.group.size();
        if self.count_a > t || self.count_b > t {
            self.set_output(true, out)
        } else if self.count_c >= m - t {
            self.set_output(false, out)
        } else {
            None
        }
    }

    fn set_output(&mut self, bit: bool, out: &mut Outbox) -> Option<bool> {
        if self.output.is_some() {
            return None;
        }
        self.output = Some(bit);
        out.fact(Fact::AbbbaOutput {
            tag: self.tag.clone(),
            bit,
        });
        Some(bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bytes::Bytes;

    fn instance() -> (Abbba, Outbox) {
        let tag = ProtocolTag::new(Bytes::from_static(b"t"), 1, crate::types::Sub::Election(0));
        (Abbba::new(tag, Group::all(4)), Outbox::new(NodeId(1)))
    }

    #[test]
    fn one_input_outputs_immediately() {
        for (a, b) in [(true, true), (false, true), (true, false)] {
            let (mut x, mut out) = instance();
            assert_eq!(x.input(a, b, &mut out), Ok(Some(true)));
        }
        let (mut x, mut out) = instance();
        assert_eq!(x.input(false, false, &mut out), Ok(None));
        assert_eq!(x.input(false, false, &mut out), Err(RepeatedInput));
    }

    #[test]
    fn counter_thresholds() {
        let (mut x, mut out) = instance();
        x.input(false, false, &mut out).unwrap();
        assert_eq!(x.on_value(NodeId(2), 1, 0, &mut out), None);
        assert_eq!(x.on_value(NodeId(3), 1, 0, &mut out), Some(true));

        let (mut x, mut out) = instance();
        x.input(false, false, &mut out).unwrap();
        for j in 1..=3 {
            let r = x.on_value(NodeId(j), 0, 0, &mut out);
            assert_eq!(r, if j == 3 { Some(false) } else { None });
        }

        let (mut x, mut out) = instance();
        x.input(false, false, &mut out).unwrap();
        assert_eq!(x.on_value(NodeId(1), 0, 1, &mut out), None);
        assert_eq!(x.on_value(NodeId(2), 0, 0, &mut out), None);
        assert_eq!(x.on_value(NodeId(3), 0, 1, &mut out), Some(true));
    }

    #[test]
    fn duplicates_and_garbage_dropped() {
        let (mut x, mut out) = instance();
        x.input(false, false, &mut out).unwrap();
        x.on_value(NodeId(2), 1, 0, &mut out);
        x.on_value(NodeId(2), 1, 0, &mut out);
        x.on_value(NodeId(3), 2, 0, &mut out);
        x.on_value(NodeId(9), 1, 1, &mut out);
        assert_eq!(x.counts(), (1, 0, 1));
        assert_eq!(x.output(), None);
    }
}
