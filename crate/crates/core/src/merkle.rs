//! Merkle-tree vector commitments.
//!
//! Leaves hash `0x00 | j | y` (position included, so padding cannot alias
//! positions), interior nodes hash `0x01 | left | right`. Odd levels repeat
//! their last node. Digests are SHA-256 truncated to `κ` bits.

use bytes::Bytes;
use sha2::{Digest, Sha256};

/// Default digest length in bits.
pub const DEFAULT_KAPPA: usize = 256;

/// Sibling path for one position; `index` is the 1-based position it opens.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpeningProof {
    pub index: u32,
    pub siblings: Vec<Bytes>,
}

fn truncate(digest: &[u8], kappa: usize) -> Bytes {
    Bytes::copy_from_slice(&digest[..kappa / 8])
}

fn leaf_hash(j: u32, y: &[u8], kappa: usize) -> Bytes {
    let mut h = Sha256::new();
    h.update([0u8]);
    h.update(j.to_be_bytes());
    h.update(y);
    truncate(&h.finalize(), kappa)
}

fn node_hash(left: &[u8], right: &[u8], kappa: usize) -> Bytes {
    let mut h = Sha256::new();
    h.update([1u8]);
    h.update(left);
    h.update(right);
    truncate(&h.finalize(), kappa)
}

#[derive(Clone, Debug)]
pub struct MerkleTree {
    kappa: usize,
    /// `levels[0]` are leaf digests, the last level holds the root.
    levels: Vec<Vec<Bytes>>,
}

impl MerkleTree {
    /// Commit to `vector`; `kappa` is a multiple of 8 in `8..=256`.
    pub fn commit<T: AsRef<[u8]>>(vector: &[T], kappa: usize) -> Self {
        assert!(!vector.is_empty(), "cannot commit to an empty vector");
        assert!(
            kappa.is_multiple_of(8) && (8..=256).contains(&kappa),
            "bad digest length {kappa}"
        );
        let leaves: Vec<Bytes> = vector
            .iter()
            .enumerate()
            .map(|(i, y)| leaf_hash(i as u32 + 1, y.as_ref(), kappa))
            .collect();
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next = prev
                .chunks(2)
                .map(|pair| node_hash(&pair[0], pair.get(1).unwrap_or(&pair[0]), kappa))
                .collect();
            levels.push(next);
        }
        MerkleTree { kappa, levels }
    }

    pub fn root(&self) -> Bytes {
        self.levels.last().unwrap()[0].clone()
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Opening proof for position `j ∈ [1..len]`.
    pub fn open(&self, j: usize) -> OpeningProof {
        assert!(j >= 1 && j <= self.len(), "position {j} out of range");
        let mut idx = j - 1;
        let mut siblings = Vec::with_capacity(self.levels.len() - 1);
        for level in &self.levels[..self.levels.len() - 1] {
            let sib = idx ^ 1;
            siblings.push(level.get(sib).unwrap_or(&level[idx]).clone());
            idx /= 2;
        }
        OpeningProof {
            index: j as u32,
            siblings,
        }
    }
}

/// True iff `proof` reconstructs `root` from `(j, y)`.
pub fn verify(j: usize, root: &[u8], y: &[u8], proof: &OpeningProof) -> bool {
    let kappa = root.len() * 8;
    if !(8..=256).contains(&kappa) || proof.index as usize != j || j == 0 {
        return false;
    }
    if proof.siblings.iter().any(|s| s.len() != root.len()) || proof.siblings.len() >= 32 {
        return false;
    }
    let mut idx = j - 1;
    let mut acc = leaf_hash(j as u32, y, kappa);
    for sib in &proof.siblings {
        acc = if idx.is_multiple_of(2) {
            node_hash(&acc, sib, kappa)
        } else {
            node_hash(sib, &acc, kappa)
        };
        idx /= 2;
    }
    idx == 0 && acc.as_ref() == root
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|i| vec![i as u8; 3 + i]).collect()
    }

    #[test]
    fn single_leaf_root_is_leaf_hash() {
        let t = MerkleTree::commit(&[b"x"], 256);
        assert_eq!(t.root(), leaf_hash(1, b"x", 256));
        assert!(t.open(1).siblings.is_empty());
    }

    #[test]
    fn depth_matches_log() {
        assert_eq!(MerkleTree::commit(&vector(4), 256).open(2).siblings.len(), 2);
        assert_eq!(MerkleTree::commit(&vector(5), 256).open(5).siblings.len(), 3);
    }

    #[test]
    fn completeness_small() {
        for n in 1..=8 {
            let v = vector(n);
            let t = MerkleTree::commit(&v, 256);
            for j in 1..=n {
                assert!(verify(j, &t.root(), &v[j - 1], &t.open(j)));
            }
        }
    }

    #[test]
    fn wrong_position_rejected() {
        let v = vector(6);
        let t = MerkleTree::commit(&v, 256);
        let mut p = t.open(2);
        assert!(!verify(3, &t.root(), &v[1], &p));
        p.index = 3;
        assert!(!verify(3, &t.root(), &v[1], &p));
    }

    #[test]
    fn flipped_bit_and_truncated_path_rejected() {
        let v = vector(7);
        let t = MerkleTree::commit(&v, 256);
        let mut y = v[3].clone();
        y[0] ^= 1;
        assert!(!verify(4, &t.root(), &y, &t.open(4)));
        let mut p = t.open(4);
        p.siblings.pop();
        assert!(!verify(4, &t.root(), &v[3], &p));
    }

    #[test]
    fn padding_does_not_alias() {
        let v = vector(3);
        let t = MerkleTree::commit(&v, 256);
        let mut p = t.open(3);
        p.index = 4;
        assert!(!verify(4, &t.root(), &v[2], &p));
    }

    #[test]
    fn commitments_are_deterministic_and_sensitive() {
        let v = vector(5);
        assert_eq!(MerkleTree::commit(&v, 128).root(), MerkleTree::commit(&v, 128).root());
        let mut w = v.clone();
        w[4][0] ^= 0x80;
        assert_ne!(MerkleTree::commit(&v, 128).root(), MerkleTree::commit(&w, 128).root());
        assert_eq!(MerkleTree::commit(&v, 128).root().len(), 16);
    }
}
