//! Node groups and the recursive network tree.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::types::{fault_threshold, NodeId};

/// Default largest group size handled by the base-case agreement.
pub const DEFAULT_LEAF_SIZE: usize = 4;

/// An ordered set of nodes running one protocol instance together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    members: Arc<[NodeId]>,
    t: usize,
}

impl Group {
    /// `members` must be non-empty; they are sorted by index.
    pub fn new(mut members: Vec<NodeId>) -> Self {
        assert!(!members.is_empty(), "empty group");
        members.sort();
        members.dedup();
        Group {
            t: fault_threshold(members.len()),
            members: members.into(),
        }
    }

    /// Same members with fault threshold `t` instead of `⌊(m−1)/3⌋`.
    pub fn with_threshold(self, t: usize) -> Self {
        assert!(t < self.size(), "threshold must be below the group size");
        Group { t, ..self }
    }

    /// Nodes `1..=n`.
    pub fn all(n: usize) -> Self {
        Group::new((0..n).map(NodeId::from_slot).collect())
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Fault threshold, `⌊(m−1)/3⌋` unless set explicitly.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    /// 1-based position of `id` inside the group.
    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.members.binary_search(&id).ok().map(|p| p + 1)
    }

    /// Member at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> NodeId {
        self.members[pos - 1]
    }

    /// The halves `(first ⌊m/2⌋, remaining ⌈m/2⌉)` by index.
    pub fn split(&self) -> (Group, Group) {
        let half = self.size() / 2;
        (
            Group::new(self.members[..half].to_vec()),
            Group::new(self.members[half..].to_vec()),
        )
    }
}

/// Recursive balanced partition of the network down to groups of size at most the leaf size.
#[derive(Clone, Debug)]
pub struct NetworkTree {
    leaf_size: usize,
    groups: BTreeMap<u32, Group>,
}

impl NetworkTree {
    pub fn build(n: usize, leaf_size: usize) -> Self {
        assert!(n >= 1 && leaf_size >= 1, "bad tree parameters");
        let mut groups = BTreeMap::new();
        let mut stack = vec![(1u32, Group::all(n))];
        while let Some((g, group)) = stack.pop() {
            if group.size() > leaf_size {
                let (left, right) = group.split();
                stack.push((2 * g, left));
                stack.push((2 * g + 1, right));
            }
            groups.insert(g, group);
        }
        NetworkTree { leaf_size, groups }
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn group(&self, g: u32) -> Option<&Group> {
        self.groups.get(&g)
    }

    pub fn is_leaf(&self, g: u32) -> bool {
        self.groups.get(&g).is_some_and(|s| s.size() <= self.leaf_size)
    }

    pub fn groups(&self) -> impl Iterator<Item = (u32, &Group)> {
        self.groups.iter().map(|(g, s)| (*g, s))
    }

    /// Groups containing `id`, root first.
    pub fn chain(&self, id: NodeId) -> Vec<u32> {
        let mut out = vec![1];
        let mut g = 1;
        while !self.is_leaf(g) {
            g = if self.groups[&(2 * g)].contains(id) {
                2 * g
            } else {
                2 * g + 1
            };
            out.push(g);
        }
        out
    }

    /// Which half (0 or 1) of inner group `g` holds `id`.
    pub fn subset_of(&self, g: u32, id: NodeId) -> u8 {
        if self.groups[&(2 * g)].contains(id) {
            0
        } else {
            1
        }
    }

    /// A root-to-leaf chain whose every group has at most its fault
    /// threshold of members in `faulty`, if one exists.
    pub fn good_chain(&self, faulty: &BTreeSet<NodeId>) -> Option<Vec<u32>> {
        let good = |g: u32| {
            let s = &self.groups[&g];
            s.members().iter().filter(|m| faulty.contains(m)).count() <= s.t()
        };
        if !good(1) {
            return None;
        }
        let mut chain = vec![1];
        let mut g = 1;
        while !self.is_leaf(g) {
            g = [2 * g, 2 * g + 1].into_iter().find(|&c| good(c))?;
            chain.push(g);
        }
        Some(chain)
    }
}
