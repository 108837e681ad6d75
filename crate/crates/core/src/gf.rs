//! Finite field arithmetic over `GF(2^m)` (log tables) and small prime fields.

use std::sync::{Arc, OnceLock};

/// Field element, by integer representation.
pub type Elem = u32;

/// Primitive polynomials for `GF(2^m)`, indexed by `m`, with the `x^m` term included.
const PRIMITIVE: [u32; 17] = [
    0, 0, 0x7, 0xb, 0x13, 0x25, 0x43, 0x89, 0x11d, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x4443, 0x8003, 0x1100b,
];

#[derive(Debug)]
enum Repr {
    Binary { exp: Vec<Elem>, log: Vec<u32> },
    Prime,
}

#[derive(Debug)]
pub struct GaloisField {
    order: u32,
    repr: Repr,
}

impl GaloisField {
    /// `GF(2^m)` for `2 ≤ m ≤ 16`.
    pub fn binary(m: u32) -> Self {
        assert!((2..=16).contains(&m), "unsupported extension degree {m}");
        let order = 1u32 << m;
        let poly = PRIMITIVE[m as usize];
        let mut exp = vec![0; 2 * (order as usize - 1)];
        let mut log = vec![0; order as usize];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().enumerate().take(order as usize - 1) {
            *e = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & order != 0 {
                x ^= poly;
            }
        }
        for i in order as usize - 1..exp.len() {
            exp[i] = exp[i - (order as usize - 1)];
        }
        GaloisField {
            order,
            repr: Repr::Binary { exp, log },
        }
    }

    /// `GF(p)` for a prime `p < 2^16`.
    pub fn prime(p: u32) -> Self {
        assert!((2..1 << 16).contains(&p) && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)));
        GaloisField {
            order: p,
            repr: Repr::Prime,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Binary { .. } => a ^ b,
            Repr::Prime => (a + b) % self.order,
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Binary { .. } => a ^ b,
            Repr::Prime => (a + self.order - b) % self.order,
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.repr {
            Repr::Binary { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
            Repr::Prime => (a * b) % self.order,
        }
    }

    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        match &self.repr {
            Repr::Binary { exp, log } => exp[((self.order - 1 - log[a as usize]) % (self.order - 1)) as usize],
            Repr::Prime => self.pow(a, self.order - 2),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, mut a: Elem, mut e: u32) -> Elem {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

/// Shared `GF(2^8)` instance.
pub fn gf256() -> Arc<GaloisField> {
    static F: OnceLock<Arc<GaloisField>> = OnceLock::new();
    F.get_or_init(|| Arc::new(GaloisField::binary(8))).clone()
}

/// Shared `GF(2^16)` instance.
pub fn gf65536() -> Arc<GaloisField> {
    static F: OnceLock<Arc<GaloisField>> = OnceLock::new();
    F.get_or_init(|| Arc::new(GaloisField::binary(16))).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &GaloisField) {
        let q = f.order();
        for a in 0..q {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1, "a={a}");
            }
            for b in 0..q {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn small_fields_are_fields() {
        check_axioms(&GaloisField::binary(4));
        check_axioms(&GaloisField::prime(5));
        check_axioms(&GaloisField::prime(7));
    }

    #[test]
    fn binary_tables_cover_all_units() {
        for m in 2..=12 {
            let f = GaloisField::binary(m);
            let mut seen = vec![false; f.order() as usize];
            let mut x = 1;
            for _ in 0..f.order() - 1 {
                assert!(!seen[x as usize], "generator order too small for m={m}");
                seen[x as usize] = true;
                x = f.mul(x, 2);
            }
            assert_eq!(x, 1);
        }
    }

    #[test]
    fn gf256_distributes() {
        let f = gf256();
        for a in (0..256).step_by(7) {
            for b in (0..256).step_by(11) {
                for c in (0..256).step_by(13) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}
