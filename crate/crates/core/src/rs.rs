//! Reed–Solomon evaluation codes with error-and-erasure decoding.
//!
//! A message of `k` field symbols is the coefficient vector of a polynomial
//! `p` of degree `< k`; position `j ∈ [1..n]` carries `p(x_j)` with `x_j` the
//! field element whose integer representation is `j`. Erasures are handled
//! by leaving positions out of the observation; errors are corrected with
//! Gao's extended-Euclid decoder whenever `2e + k ≤ n'`.

use std::sync::Arc;

use thiserror::Error;

use crate::gf::{Elem, GaloisField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("code length {n} exceeds field size bound {max}")]
    LengthTooLarge { n: usize, max: usize },
    #[error("dimension {k} must lie in 1..={n}")]
    BadDimension { k: usize, n: usize },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeFailure {
    #[error("{have} symbols observed, at least {need} required")]
    TooFewSymbols { have: usize, need: usize },
    #[error("errors detected beyond correction capability")]
    Uncorrectable,
    #[error("observation refers to a position outside 1..=n")]
    BadPosition,
}

/// Polynomial helpers; coefficient vectors are little-endian.
mod poly {
    use super::*;

    pub fn trim(p: &mut Vec<Elem>) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(p: &[Elem]) -> Option<usize> {
        p.iter().rposition(|&c| c != 0)
    }

    pub fn eval(f: &GaloisField, p: &[Elem], x: Elem) -> Elem {
        p.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn mul(f: &GaloisField, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn sub(f: &GaloisField, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a / b`, `b` non-zero.
    pub fn divrem(f: &GaloisField, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = f.inv(b[db]);
        let mut rem = a.to_vec();
        trim(&mut rem);
        if rem.len() <= db {
            return (Vec::new(), rem);
        }
        let mut quo = vec![0; rem.len() - db];
        while let Some(dr) = degree(&rem) {
            if dr < db {
                break;
            }
            let c = f.mul(rem[dr], lead_inv);
            quo[dr - db] = c;
            for (i, &bc) in b[..=db].iter().enumerate() {
                rem[dr - db + i] = f.sub(rem[dr - db + i], f.mul(c, bc));
            }
            trim(&mut rem);
        }
        trim(&mut quo);
        (quo, rem)
    }
}

/// An `(n, k)` Reed–Solomon code over a given field.
#[derive(Debug, Clone)]
pub struct ReedSolomon {
    field: Arc<GaloisField>,
    n: usize,
    k: usize,
    /// `powers[j-1][c] = x_j^c`.
    powers: Vec<Vec<Elem>>,
}

impl ReedSolomon {
    pub fn new(field: Arc<GaloisField>, n: usize, k: usize) -> Result<Self, ParamError> {
        let max = field.order() as usize - 1;
        if n > max {
            return Err(ParamError::LengthTooLarge { n, max });
        }
        if k == 0 || k > n {
            return Err(ParamError::BadDimension { k, n });
        }
        let powers = (1..=n)
            .map(|j| {
                let mut row = Vec::with_capacity(k);
                let mut acc = 1;
                for _ in 0..k {
                    row.push(acc);
                    acc = field.mul(acc, j as Elem);
                }
                row
            })
            .collect();
        Ok(ReedSolomon { field, n, k, powers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    /// Evaluation point of position `j`.
    pub fn point(j: usize) -> Elem {
        j as Elem
    }

    /// Symbol at position `j ∈ [1..n]`.
    pub fn encode_at(&self, msg: &[Elem], j: usize) -> Elem {
        assert_eq!(msg.len(), self.k);
        let f = &*self.field;
        self.powers[j - 1]
            .iter()
            .zip(msg)
            .fold(0, |acc, (&p, &m)| f.add(acc, f.mul(p, m)))
    }

    pub fn encode(&self, msg: &[Elem]) -> Vec<Elem> {
        (1..=self.n).map(|j| self.encode_at(msg, j)).collect()
    }

    /// Decode from `(position, symbol)` pairs with distinct positions.
    pub fn decode(&self, observed: &[(usize, Elem)]) -> Result<Vec<Elem>, DecodeFailure> {
        let positions: Vec<usize> = observed.iter().map(|&(p, _)| p).collect();
        let plan = self.plan(&positions)?;
        let values: Vec<Elem> = observed.iter().map(|&(_, v)| v).collect();
        plan.decode(&values)
    }

    /// Precompute decoding state for a fixed set of observed positions, so
    /// that many stripes sharing the same positions decode cheaply.
    pub fn plan(&self, positions: &[usize]) -> Result<DecodePlan, DecodeFailure> {
        if positions.iter().any(|&p| p == 0 || p > self.n) {
            return Err(DecodeFailure::BadPosition);
        }
        if positions.len() < self.k {
            return Err(DecodeFailure::TooFewSymbols {
                have: positions.len(),
                need: self.k,
            });
        }
        DecodePlan::new(self.clone(), positions)
    }
}

/// Decoding state specialised to one set of observed positions.
#[derive(Debug, Clone)]
pub struct DecodePlan {
    rs: ReedSolomon,
    points: Vec<Elem>,
    /// Inverse Vandermonde of the first `k` points: coefficients = inv · values.
    inv: Vec<Vec<Elem>>,
    /// Row `i` evaluates the interpolant of the first `k` points at point `k+i`.
    check: Vec<Vec<Elem>>,
    /// `Π (x − x_i)` over all observed points.
    vanishing: Vec<Elem>,
    /// Lagrange basis polynomials over all observed points.
    basis: Vec<Vec<Elem>>,
}

impl DecodePlan {
    fn new(rs: ReedSolomon, positions: &[usize]) -> Result<Self, DecodeFailure> {
        let f = rs.field.clone();
        let k = rs.k;
        let points: Vec<Elem> = positions.iter().map(|&p| ReedSolomon::point(p)).collect();
        {
            let mut sorted = points.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != points.len() {
                return Err(DecodeFailure::BadPosition);
            }
        }
        let head = &points[..k];
        let head_basis = lagrange_basis(&f, head);
        // inv[c][i] = coefficient c of basis polynomial i.
        let inv = (0..k)
            .map(|c| head_basis.iter().map(|b| b.get(c).copied().unwrap_or(0)).collect())
            .collect();
        let check = points[k..]
            .iter()
            .map(|&x| head_basis.iter().map(|b| poly::eval(&f, b, x)).collect())
            .collect();
        let mut vanishing = vec![1];
        for &x in &points {
            vanishing = poly::mul(&f, &vanishing, &[f.neg(x), 1]);
        }
        let basis = if points.len() > k {
            lagrange_basis(&f, &points)
        } else {
            Vec::new()
        };
        Ok(DecodePlan {
            rs,
            points,
            inv,
            check,
            vanishing,
            basis,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Decode one stripe whose values line up with the plan's positions.
    pub fn decode(&self, values: &[Elem]) -> Result<Vec<Elem>, DecodeFailure> {
        assert_eq!(values.len(), self.points.len());
        let f = &*self.rs.field;
        let k = self.rs.k;
        let coeffs: Vec<Elem> = self
            .inv
            .iter()
            .map(|row| row.iter().zip(values).fold(0, |acc, (&a, &v)| f.add(acc, f.mul(a, v))))
            .collect();
        let consistent = self.check.iter().zip(&values[k..]).all(|(row, &v)| {
            row.iter()
                .zip(&values[..k])
                .fold(0, |acc, (&a, &y)| f.add(acc, f.mul(a, y)))
                == v
        });
        if consistent {
            return Ok(coeffs);
        }
        self.gao(values)
    }

    fn gao(&self, values: &[Elem]) -> Result<Vec<Elem>, DecodeFailure> {
        let f = &*self.rs.field;
        let k = self.rs.k;
        let n = self.points.len();
        let mut g1 = vec![0; n];
        for (b, &v) in self.basis.iter().zip(values) {
            if v == 0 {
                continue;
            }
            for (c, &bc) in b.iter().enumerate() {
                g1[c] = f.add(g1[c], f.mul(v, bc));
            }
        }
        poly::trim(&mut g1);
        // Partial extended Euclid: stop once deg r < (n + k) / 2.
        let mut r0 = self.vanishing.clone();
        let mut r1 = g1;
        let mut v0: Vec<Elem> = Vec::new();
        let mut v1: Vec<Elem> = vec![1];
        loop {
            let d = poly::degree(&r1).map_or(0, |d| d + 1);
            // deg r1 < (n+k)/2  ⇔  2·deg r1 < n + k
            if r1.is_empty() || 2 * (d - 1) < n + k {
                break;
            }
            let (q, r) = poly::divrem(f, &r0, &r1);
            let v = poly::sub(f, &v0, &poly::mul(f, &q, &v1));
            r0 = std::mem::replace(&mut r1, r);
            v0 = std::mem::replace(&mut v1, v);
        }
        if v1.is_empty() {
            return Err(DecodeFailure::Uncorrectable);
        }
        let (q, rem) = poly::divrem(f, &r1, &v1);
        if !rem.is_empty() || q.len() > k {
            return Err(DecodeFailure::Uncorrectable);
        }
        let mut out = q;
        out.resize(k, 0);
        let errors = self
            .points
            .iter()
            .zip(values)
            .filter(|&(&x, &v)| poly::eval(f, &out, x) != v)
            .count();
        if 2 * errors + k > n {
            return Err(DecodeFailure::Uncorrectable);
        }
        Ok(out)
    }
}

fn lagrange_basis(f: &GaloisField, points: &[Elem]) -> Vec<Vec<Elem>> {
    let mut full = vec![1];
    for &x in points {
        full = poly::mul(f, &full, &[f.neg(x), 1]);
    }
    points
        .iter()
        .map(|&xi| {
            let (num, _) = poly::divrem(f, &full, &[f.neg(xi), 1]);
            let denom = points
                .iter()
                .filter(|&&xj| xj != xi)
                .fold(1, |acc, &xj| f.mul(acc, f.sub(xi, xj)));
            let scale = f.inv(denom);
            let mut b: Vec<Elem> = num.iter().map(|&c| f.mul(c, scale)).collect();
            b.resize(points.len(), 0);
            b
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf5_code() -> ReedSolomon {
        ReedSolomon::new(Arc::new(GaloisField::prime(5)), 4, 2).unwrap()
    }

    #[test]
    fn gf5_encode_example() {
        assert_eq!(gf5_code().encode(&[1, 2]), vec![3, 0, 2, 4]);
    }

    #[test]
    fn gf5_erasure_decode_example() {
        assert_eq!(gf5_code().decode(&[(1, 3), (3, 2)]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn gf5_single_error_example() {
        let obs = [(1, 3), (2, 1), (3, 2), (4, 4)];
        assert_eq!(gf5_code().decode(&obs).unwrap(), vec![1, 2]);
    }

    #[test]
    fn param_errors() {
        let f = Arc::new(GaloisField::binary(4));
        assert!(matches!(
            ReedSolomon::new(f.clone(), 16, 2),
            Err(ParamError::LengthTooLarge { .. })
        ));
        assert!(matches!(
            ReedSolomon::new(f.clone(), 5, 6),
            Err(ParamError::BadDimension { .. })
        ));
        assert!(matches!(
            ReedSolomon::new(f, 5, 0),
            Err(ParamError::BadDimension { .. })
        ));
    }

    #[test]
    fn zero_message_zero_codeword() {
        let rs = ReedSolomon::new(Arc::new(GaloisField::binary(4)), 15, 5).unwrap();
        assert!(rs.encode(&[0; 5]).iter().all(|&s| s == 0));
    }

    #[test]
    fn full_rank_round_trip() {
        let rs = ReedSolomon::new(Arc::new(GaloisField::binary(4)), 6, 6).unwrap();
        let msg = [1, 5, 9, 0, 15, 3];
        let cw = rs.encode(&msg);
        let obs: Vec<_> = cw.iter().enumerate().map(|(i, &s)| (i + 1, s)).collect();
        assert_eq!(rs.decode(&obs).unwrap(), msg);
    }

    #[test]
    fn too_few_symbols() {
        assert_eq!(
            gf5_code().decode(&[(2, 0)]),
            Err(DecodeFailure::TooFewSymbols { have: 1, need: 2 })
        );
    }
}
