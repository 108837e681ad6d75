//! Randomized forgery search against the Merkle vector commitment.

use bytes::Bytes;
use mvba_core::merkle::{verify, MerkleTree, OpeningProof};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flip(b: &Bytes, rng: &mut ChaCha8Rng) -> Bytes {
    let mut v = b.to_vec();
    if v.is_empty() {
        v.push(rng.gen());
    } else {
        let i = rng.gen_range(0..v.len());
        v[i] ^= 1 << rng.gen_range(0..8);
    }
    Bytes::from(v)
}

/// Run `trials` mutations of honest openings and return how many were
/// accepted as a different `(position, value)` than the committed one.
pub fn accepted_forgeries(trials: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=40);
        let kappa = [64, 128, 256][rng.gen_range(0..3)];
        let vector: Vec<Bytes> = (0..n)
            .map(|_| Bytes::from((0..rng.gen_range(0..24)).map(|_| rng.gen()).collect::<Vec<u8>>()))
            .collect();
        let tree = MerkleTree::commit(&vector, kappa);
        let root = tree.root();
        let j = rng.gen_range(1..=n);
        let mut y = vector[j - 1].clone();
        let mut pos = j;
        let mut proof = tree.open(j);
        match rng.gen_range(0..5) {
            0 => y = flip(&y, &mut rng),
            1 if !proof.siblings.is_empty() => {
                let i = rng.gen_range(0..proof.siblings.len());
                proof.siblings[i] = flip(&proof.siblings[i], &mut rng);
                y = flip(&y, &mut rng);
            }
            2 if n > 1 => {
                // Claim another position's value under this opening.
                let other = (j % n) + 1;
                y = vector[other - 1].clone();
                pos = other;
                proof = OpeningProof {
                    index: other as u32,
                    siblings: proof.siblings,
                };
            }
            3 => {
                // Truncated or extended path with a different value.
                if proof.siblings.is_empty() || rng.gen_bool(0.5) {
                    proof.siblings.push(root.clone());
                } else {
                    proof.siblings.pop();
                }
                y = flip(&y, &mut rng);
            }
            _ => {
                let mut v = y.to_vec();
                v.extend((0..rng.gen_range(1..4)).map(|_| rng.gen::<u8>()));
                y = Bytes::from(v);
            }
        }
        let honest_claim = pos <= n && vector[pos - 1] == y;
        if !honest_claim && verify(pos, &root, &y, &proof) {
            accepted += 1;
        }
    }
    accepted
}
