mod common;

use std::sync::Arc;

use bytes::Bytes;
use common::rs_oracle;
use mvba_core::codec::{oec_try_decode, Codec, OecOutcome, SymbolMap};
use mvba_core::gf::GaloisField;
use mvba_core::rs::ReedSolomon;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf16() -> Arc<GaloisField> {
    Arc::new(GaloisField::binary(4))
}

#[test]
fn oracle_field_matches_production_field() {
    let f = gf16();
    for a in 0..16 {
        for b in 0..16 {
            assert_eq!(f.mul(a, b), rs_oracle::mul(a, b), "{a}*{b}");
        }
    }
}

#[test]
fn oracle_encoding_matches_production() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=15 {
        for k in 1..=n {
            let rs = ReedSolomon::new(gf16(), n, k).unwrap();
            let msg: Vec<u32> = (0..k).map(|_| rng.gen_range(0..16)).collect();
            assert_eq!(rs.encode(&msg), rs_oracle::encode(&msg, n));
        }
    }
}

#[test]
fn decoder_agrees_with_oracle_on_sampled_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=15 {
        for k in 1..=n {
            let rs = ReedSolomon::new(gf16(), n, k).unwrap();
            for observed_len in k..=n {
                for errors in 0..=(observed_len - k) / 2 {
                    let (msg, observed) = rs_oracle::corrupted_word(n, k, n - observed_len, errors, &mut rng);
                    let oracle = rs_oracle::decode(k, &observed);
                    assert_eq!(oracle.as_ref(), Some(&msg), "oracle n={n} k={k}");
                    assert_eq!(
                        rs.decode(&observed).ok(),
                        oracle,
                        "n={n} k={k} n'={observed_len} e={errors}"
                    );
                }
            }
        }
    }
}

#[test]
fn oec_example_seven_two_two() {
    // n=7, k=2, t=2: two forged symbols arrive first.
    let codec = Codec::new(7, 2).unwrap();
    let w = b"online error correction".to_vec();
    let shares = codec.encode(&w);
    let mut obs = SymbolMap::new();
    let order = [3usize, 6, 1, 2, 4, 5, 7];
    let mut decoded_at = None;
    for (i, &j) in order.iter().enumerate() {
        let s = if i < 2 {
            Bytes::from(shares[j - 1].iter().map(|b| b ^ 0x5a).collect::<Vec<u8>>())
        } else {
            shares[j - 1].clone()
        };
        obs.insert(j, s);
        if let OecOutcome::Decoded(v) = oec_try_decode(&codec, 2, &obs) {
            assert_eq!(v, w);
            decoded_at = Some(i + 1);
            break;
        }
    }
    // k + t honest symbols are present after 6 arrivals.
    assert_eq!(decoded_at, Some(6));
}

#[test]
fn oec_needs_at_most_t_extra_arrivals() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, t) in [(4, 1), (7, 2), (10, 3), (13, 4), (16, 5)] {
        for k in 1..=t + 1 {
            let codec = Codec::new(n, k).unwrap();
            for _ in 0..20 {
                let w: Vec<u8> = (0..rng.gen_range(1..50)).map(|_| rng.gen()).collect();
                let shares = codec.encode(&w);
                let mut order: Vec<usize> = (1..=n).collect();
                order.shuffle(&mut rng);
                let bad: Vec<usize> = order.choose_multiple(&mut rng, t).copied().collect();
                let mut obs = SymbolMap::new();
                let mut honest = 0;
                let mut first_attempt = None;
                for (i, &j) in order.iter().enumerate() {
                    let s = if bad.contains(&j) {
                        Bytes::from(vec![0xee; shares[j - 1].len()])
                    } else {
                        honest += 1;
                        shares[j - 1].clone()
                    };
                    obs.insert(j, s);
                    if obs.len() == k + t {
                        first_attempt = Some(i + 1);
                    }
                    match oec_try_decode(&codec, t, &obs) {
                        OecOutcome::Decoded(v) => {
                            assert_eq!(v, w);
                            assert!(i < first_attempt.unwrap() + t);
                            break;
                        }
                        OecOutcome::Wait => assert!(honest < k + t, "n={n} k={k}: k+t honest symbols present"),
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn codec_round_trip_within_capacity(
        w in proptest::collection::vec(any::<u8>(), 0..200),
        n in 1usize..30,
        k_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let codec = Codec::new(n, k).unwrap();
        let shares = codec.encode(&w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keep = rng.gen_range(k..=n);
        let errors = rng.gen_range(0..=(keep - k) / 2);
        let mut pos: Vec<usize> = (1..=n).collect();
        pos.shuffle(&mut rng);
        let mut obs = SymbolMap::new();
        for (i, &j) in pos[..keep].iter().enumerate() {
            let mut s = shares[j - 1].to_vec();
            if i < errors {
                if s.is_empty() {
                    continue;
                }
                s[0] ^= 0x80;
            }
            obs.insert(j, Bytes::from(s));
        }
        prop_assert_eq!(codec.decode(&obs).unwrap(), Bytes::from(w));
    }

    #[test]
    fn erasure_decoding_from_any_k_shares(
        w in proptest::collection::vec(any::<u8>(), 0..100),
        n in 1usize..20,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=n);
        let codec = Codec::new(n, k).unwrap();
        let shares = codec.encode(&w);
        let mut pos: Vec<usize> = (1..=n).collect();
        pos.shuffle(&mut rng);
        let obs: SymbolMap = pos[..k].iter().map(|&j| (j, shares[j - 1].clone())).collect();
        prop_assert_eq!(codec.decode_erasure(&obs).unwrap(), Bytes::from(w));
    }
}
