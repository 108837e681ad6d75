//! Brute-force Reed–Solomon reference decoder over GF(16).
//!
//! Arithmetic is carry-less multiplication reduced by `x^4 + x + 1`, written
//! out here without tables. A codeword of message `m` has symbol
//! `m_0 + m_1 x_j + ... + m_{k-1} x_j^{k-1}` at position `j`, with `x_j = j`.
//! Decoding searches every candidate message (small `k`) or every
//! interpolant through `k` observed symbols (larger `k`) and returns the one
//! within the unique-decoding radius.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn mul(a: u32, b: u32) -> u32 {
    let mut acc = 0u32;
    for i in 0..4 {
        if b >> i & 1 == 1 {
            acc ^= a << i;
        }
    }
    for bit in (4..8).rev() {
        if acc >> bit & 1 == 1 {
            acc ^= 0x13 << (bit - 4);
        }
    }
    acc
}

pub fn inv(a: u32) -> u32 {
    assert_ne!(a, 0);
    (1..16).find(|&b| mul(a, b) == 1).unwrap()
}

pub fn eval(msg: &[u32], x: u32) -> u32 {
    msg.iter().rev().fold(0, |acc, &c| mul(acc, x) ^ c)
}

pub fn encode(msg: &[u32], n: usize) -> Vec<u32> {
    (1..=n as u32).map(|x| eval(msg, x)).collect()
}

/// Coefficients of the unique polynomial of degree `< k` through `pts`.
fn interpolate(pts: &[(u32, u32)]) -> Vec<u32> {
    let k = pts.len();
    let mut coeffs = vec![0u32; k];
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        // Basis polynomial prod_{j != i} (x - xj) / (xi - xj).
        let mut basis = vec![1u32];
        let mut denom = 1u32;
        for (j, &(xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0u32; basis.len() + 1];
            for (d, &c) in basis.iter().enumerate() {
                next[d + 1] ^= c;
                next[d] ^= mul(c, xj);
            }
            basis = next;
            denom = mul(denom, xi ^ xj);
        }
        let scale = mul(yi, inv(denom));
        for (d, &c) in basis.iter().enumerate() {
            coeffs[d] ^= mul(c, scale);
        }
    }
    coeffs
}

fn agreement(msg: &[u32], observed: &[(usize, u32)]) -> usize {
    observed.iter().filter(|&&(p, v)| eval(msg, p as u32) == v).count()
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == k {
        return out(cur);
    }
    for i in start..n {
        cur.push(i);
        if subsets(n, k, i + 1, cur, out) {
            return true;
        }
        cur.pop();
    }
    false
}

/// The message whose codeword disagrees with `observed` in at most
/// `⌊(|observed| − k)/2⌋` positions, if any.
pub fn decode(k: usize, observed: &[(usize, u32)]) -> Option<Vec<u32>> {
    let np = observed.len();
    if np < k {
        return None;
    }
    let need = np - (np - k) / 2;
    if k <= 3 {
        let total = 16u32.pow(k as u32);
        for code in 0..total {
            let msg: Vec<u32> = (0..k).map(|i| code >> (4 * i) & 0xf).collect();
            if agreement(&msg, observed) >= need {
                return Some(msg);
            }
        }
        return None;
    }
    let mut found = None;
    subsets(np, k, 0, &mut Vec::new(), &mut |idx| {
        let pts: Vec<(u32, u32)> = idx.iter().map(|&i| (observed[i].0 as u32, observed[i].1)).collect();
        let msg = interpolate(&pts);
        if agreement(&msg, observed) >= need {
            found = Some(msg);
            true
        } else {
            false
        }
    });
    found
}

/// Observed symbols of a random codeword with `erasures` dropped and
/// `errors` corrupted, plus the message.
pub fn corrupted_word(
    n: usize,
    k: usize,
    erasures: usize,
    errors: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<u32>, Vec<(usize, u32)>) {
    let msg: Vec<u32> = (0..k).map(|_| rng.gen_range(0..16)).collect();
    let word = encode(&msg, n);
    let mut positions: Vec<usize> = (1..=n).collect();
    positions.shuffle(rng);
    positions.truncate(n - erasures);
    let mut observed: Vec<(usize, u32)> = positions.iter().map(|&p| (p, word[p - 1])).collect();
    for o in observed.iter_mut().take(errors) {
        o.1 ^= rng.gen_range(1..16);
    }
    observed.shuffle(rng);
    (msg, observed)
}
