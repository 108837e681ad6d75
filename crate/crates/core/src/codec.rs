//! Byte-level `(n, k)` codes built on Reed–Solomon, and online error correction.
//!
//! A message is framed as `len:u32 | bytes`, zero padded to a whole number of
//! stripes of `k` symbols, and each stripe is encoded independently. Share `j`
//! is the concatenation of every stripe's symbol `j`. Fields are `GF(2^8)`
//! for `n ≤ 255` and `GF(2^16)` above that.

use std::collections::BTreeMap;
use std::collections::HashMap;

use bytes::Bytes;
use thiserror::Error;

use crate::gf::{gf256, gf65536, Elem};
use crate::rs::{DecodeFailure, ParamError, ReedSolomon};

/// Observed shares, keyed by position `j ∈ [1..n]`.
pub type SymbolMap = BTreeMap<usize, Bytes>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error(transparent)]
    Decode(#[from] DecodeFailure),
    #[error("decoded framing is inconsistent")]
    BadFraming,
}

#[derive(Debug, Clone)]
pub struct Codec {
    rs: ReedSolomon,
    symbol_bytes: usize,
}

impl Codec {
    pub fn new(n: usize, k: usize) -> Result<Self, ParamError> {
        let (field, symbol_bytes) = if n <= 255 { (gf256(), 1) } else { (gf65536(), 2) };
        Ok(Codec {
            rs: ReedSolomon::new(field, n, k)?,
            symbol_bytes,
        })
    }

    pub fn n(&self) -> usize {
        self.rs.n()
    }

    pub fn k(&self) -> usize {
        self.rs.k()
    }

    /// Bits per field symbol (`log q`).
    pub fn symbol_bits(&self) -> usize {
        8 * self.symbol_bytes
    }

    /// Number of stripes used for a message of `len` bytes.
    pub fn stripes(&self, len: usize) -> usize {
        let per_stripe = self.k() * self.symbol_bytes;
        (4 + len).div_ceil(per_stripe)
    }

    /// Share length in bytes for a message of `len` bytes.
    pub fn share_len(&self, len: usize) -> usize {
        self.stripes(len) * self.symbol_bytes
    }

    fn message_symbols(&self, w: &[u8]) -> Vec<Elem> {
        let stripes = self.stripes(w.len());
        let total = stripes * self.k() * self.symbol_bytes;
        let mut framed = Vec::with_capacity(total);
        framed.extend_from_slice(&(w.len() as u32).to_be_bytes());
        framed.extend_from_slice(w);
        framed.resize(total, 0);
        match self.symbol_bytes {
            1 => framed.iter().map(|&b| b as Elem).collect(),
            _ => framed
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as Elem)
                .collect(),
        }
    }

    fn push_symbol(&self, out: &mut Vec<u8>, s: Elem) {
        match self.symbol_bytes {
            1 => out.push(s as u8),
            _ => out.extend_from_slice(&(s as u16).to_be_bytes()),
        }
    }

    fn read_symbol(&self, share: &[u8], stripe: usize) -> Elem {
        match self.symbol_bytes {
            1 => share[stripe] as Elem,
            _ => u16::from_be_bytes([share[2 * stripe], share[2 * stripe + 1]]) as Elem,
        }
    }

    /// All `n` shares of `w`.
    pub fn encode(&self, w: &[u8]) -> Vec<Bytes> {
        let symbols = self.message_symbols(w);
        let k = self.k();
        let mut shares = vec![Vec::with_capacity(self.share_len(w.len())); self.n()];
        for stripe in symbols.chunks_exact(k) {
            for (j, share) in shares.iter_mut().enumerate() {
                let s = self.rs.encode_at(stripe, j + 1);
                self.push_symbol(share, s);
            }
        }
        shares.into_iter().map(Bytes::from).collect()
    }

    /// Share `j ∈ [1..n]` of `w` alone.
    pub fn encode_one(&self, w: &[u8], j: usize) -> Bytes {
        let symbols = self.message_symbols(w);
        let mut share = Vec::with_capacity(self.share_len(w.len()));
        for stripe in symbols.chunks_exact(self.k()) {
            let s = self.rs.encode_at(stripe, j);
            self.push_symbol(&mut share, s);
        }
        Bytes::from(share)
    }

    /// Error-correcting decode of the observed shares.
    ///
    /// Shares whose length differs from the most common length, or whose
    /// position is out of range, are treated as erasures.
    pub fn decode(&self, observed: &SymbolMap) -> Result<Bytes, CodecError> {
        let (positions, shares) = self.usable(observed);
        if positions.len() < self.k() {
            return Err(DecodeFailure::TooFewSymbols {
                have: positions.len(),
                need: self.k(),
            }
            .into());
        }
        let plan = self.rs.plan(&positions)?;
        let share_len = shares[0].len();
        let stripes = share_len / self.symbol_bytes;
        let mut symbols = Vec::with_capacity(stripes * self.k());
        let mut values = vec![0; positions.len()];
        for stripe in 0..stripes {
            for (v, share) in values.iter_mut().zip(&shares) {
                *v = self.read_symbol(share, stripe);
            }
            symbols.extend(plan.decode(&values)?);
        }
        self.unframe(&symbols)
    }

    /// Erasure decode from the first `k` observed shares, with no error checking.
    pub fn decode_erasure(&self, observed: &SymbolMap) -> Result<Bytes, CodecError> {
        let first: SymbolMap = observed
            .iter()
            .filter(|(&j, _)| j >= 1 && j <= self.n())
            .take(self.k())
            .map(|(&j, s)| (j, s.clone()))
            .collect();
        self.decode(&first)
    }

    fn usable<'a>(&self, observed: &'a SymbolMap) -> (Vec<usize>, Vec<&'a Bytes>) {
        let mut lengths: HashMap<usize, usize> = HashMap::new();
        for (&j, s) in observed {
            if j >= 1 && j <= self.n() && !s.is_empty() && s.len() % self.symbol_bytes == 0 {
                *lengths.entry(s.len()).or_default() += 1;
            }
        }
        let Some(len) = lengths
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(len, _)| len)
        else {
            return (Vec::new(), Vec::new());
        };
        observed
            .iter()
            .filter(|(&j, s)| j >= 1 && j <= self.n() && s.len() == len)
            .map(|(&j, s)| (j, s))
            .unzip()
    }

    fn unframe(&self, symbols: &[Elem]) -> Result<Bytes, CodecError> {
        let mut bytes = Vec::with_capacity(symbols.len() * self.symbol_bytes);
        for &s in symbols {
            self.push_symbol(&mut bytes, s);
        }
        if bytes.len() < 4 {
            return Err(CodecError::BadFraming);
        }
        let len = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
        if 4 + len > bytes.len() || self.stripes(len) * self.k() * self.symbol_bytes != bytes.len() {
            return Err(CodecError::BadFraming);
        }
        if bytes[4 + len..].iter().any(|&b| b != 0) {
            return Err(CodecError::BadFraming);
        }
        Ok(Bytes::copy_from_slice(&bytes[4..4 + len]))
    }
}

/// Result of one online-error-correction attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OecOutcome {
    Decoded(Bytes),
    Wait,
}

/// Online error correction: decode once `k + t` shares are present and
/// accept only if at least `k + t` observed shares match the re-encoding.
pub fn oec_try_decode(codec: &Codec, t: usize, observed: &SymbolMap) -> OecOutcome {
    let threshold = codec.k() + t;
    if observed.len() < threshold {
        return OecOutcome::Wait;
    }
    let Ok(candidate) = codec.decode(observed) else {
        return OecOutcome::Wait;
    };
    let shares = codec.encode(&candidate);
    let matches = observed
        .iter()
        .filter(|(&j, s)| j >= 1 && j <= codec.n() && shares[j - 1] == **s)
        .count();
    if matches >= threshold {
        OecOutcome::Decoded(candidate)
    } else {
        OecOutcome::Wait
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(shares: &[Bytes]) -> SymbolMap {
        shares.iter().enumerate().map(|(i, s)| (i + 1, s.clone())).collect()
    }

    #[test]
    fn round_trip_various_lengths() {
        for (n, k) in [(4, 2), (7, 3), (10, 4), (1, 1), (16, 16)] {
            let codec = Codec::new(n, k).unwrap();
            for len in [0usize, 1, 5, 17, 100] {
                let w: Vec<u8> = (0..len).map(|i| (i * 31 + 7) as u8).collect();
                let shares = codec.encode(&w);
                assert_eq!(shares.len(), n);
                for (j, s) in shares.iter().enumerate() {
                    assert_eq!(s.len(), codec.share_len(len));
                    assert_eq!(*s, codec.encode_one(&w, j + 1));
                }
                assert_eq!(codec.decode(&all(&shares)).unwrap(), w);
            }
        }
    }

    #[test]
    fn wide_field_for_large_n() {
        let codec = Codec::new(300, 101).unwrap();
        assert_eq!(codec.symbol_bits(), 16);
        let w = b"hello wide field".to_vec();
        let shares = codec.encode(&w);
        let mut obs = all(&shares);
        let bad = obs.get_mut(&3).unwrap();
        *bad = Bytes::from(vec![0xff; bad.len()]);
        assert_eq!(codec.decode(&obs).unwrap(), w);
    }

    #[test]
    fn every_k_subset_decodes() {
        let codec = Codec::new(6, 3).unwrap();
        let w = b"subset independence".to_vec();
        let shares = codec.encode(&w);
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let obs: SymbolMap = (1..=6)
                .filter(|j| mask & (1 << (j - 1)) != 0)
                .map(|j| (j, shares[j - 1].clone()))
                .collect();
            assert_eq!(codec.decode_erasure(&obs).unwrap(), w);
        }
    }

    #[test]
    fn corrupted_erasure_set_gives_wrong_message() {
        let codec = Codec::new(6, 3).unwrap();
        let w = b"no error correction here".to_vec();
        let shares = codec.encode(&w);
        let mut obs: SymbolMap = (1..=3).map(|j| (j, shares[j - 1].clone())).collect();
        let mut s = obs[&2].to_vec();
        s[5] ^= 1;
        obs.insert(2, Bytes::from(s));
        assert_ne!(codec.decode_erasure(&obs).ok(), Some(Bytes::from(w)));
    }

    #[test]
    fn oec_waits_below_threshold() {
        let codec = Codec::new(7, 2).unwrap();
        let shares = codec.encode(b"abc");
        let obs: SymbolMap = (1..=3).map(|j| (j, shares[j - 1].clone())).collect();
        assert_eq!(oec_try_decode(&codec, 2, &obs), OecOutcome::Wait);
        let obs: SymbolMap = (1..=4).map(|j| (j, shares[j - 1].clone())).collect();
        assert_eq!(
            oec_try_decode(&codec, 2, &obs),
            OecOutcome::Decoded(Bytes::from_static(b"abc"))
        );
    }
}
