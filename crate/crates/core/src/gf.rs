//! Arithmetic in GF(q), q = p^m.
//!
//! Elements are stored as their base-p integer encoding: the polynomial
//! `c0 + c1*a + ... + c_{m-1}*a^{m-1}` (with `a` a root of the modulus) is the
//! integer `c0 + c1*p + ... + c_{m-1}*p^{m-1}`. Rep 0 is zero and rep 1 is one.
//!
//! Full `q x q` addition and multiplication tables are built once from
//! polynomial arithmetic; every operation afterwards is a table lookup.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Largest field order whose elements fit the `u8` encoding.
pub const MAX_ORDER: u64 = 256;

/// An element of some [`Field`], identified by its base-p rep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub(crate) u8);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn rep(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(p^m) with precomputed operation tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients from the constant term up (length m+1).
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, m)` with `q = p^m`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

impl Field {
    /// Builds GF(p^m) using the lexicographically smallest monic irreducible
    /// modulus of degree m (coefficient tuples compared from the constant term
    /// up). For m = 1 the modulus is `x`.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q < 3 {
            return Err(Error::FieldTooSmall(q));
        }
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let modulus = smallest_irreducible(p, m as usize);
        Ok(Self::with_modulus(p, m, q as u32, modulus))
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, m)
    }

    fn with_modulus(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Self {
        let qs = q as usize;
        let digits: Vec<Vec<u32>> = (0..q).map(|r| to_digits(r, p, m as usize)).collect();
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = digits[a].iter().zip(&digits[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = from_digits(&s, p) as u8;
                let prod = poly_mulmod(&digits[a], &digits[b], &modulus, p);
                mul[a * qs + b] = from_digits(&prod, p) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u8;
            }
        }
        Field { p, m, q, modulus, add, mul, neg, inv }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q as usize
    }

    /// Modulus coefficients from the constant term up, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Human-readable modulus in the indeterminate `a`, e.g. `a^2+a+1`.
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (deg, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match deg {
                0 => String::new(),
                1 => "a".to_string(),
                d => format!("a^{d}"),
            };
            terms.push(match (c, deg) {
                (c, 0) => c.to_string(),
                (1, _) => mono,
                (c, _) => format!("{c}*{mono}"),
            });
        }
        terms.join("+")
    }

    pub fn element(&self, rep: u32) -> Result<Fe> {
        if rep < self.q {
            Ok(Fe(rep as u8))
        } else {
            Err(Error::RepOutOfRange { rep, q: self.q })
        }
    }

    /// All elements in ascending rep order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = Fe> + Clone {
        (0..self.q as u16).map(|r| Fe(r as u8))
    }

    /// The image of the integer `n` under Z -> GF(p) -> GF(q).
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u8)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fe(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Raw addition table, row-major `q x q`.
    pub fn add_table(&self) -> &[u8] {
        &self.add
    }

    /// Raw negation table.
    pub fn neg_table(&self) -> &[u8] {
        &self.neg
    }

    /// Raw multiplication table, row-major `q x q`.
    pub fn mul_table(&self) -> &[u8] {
        &self.mul
    }

    /// Base-p digits of an element, constant term first.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        to_digits(a.rep(), self.p, self.m as usize)
    }

    /// Element with the given base-p digits (constant term first); digits are
    /// reduced mod p and missing high digits count as zero.
    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        let mut d: Vec<u32> = digits.iter().map(|c| c % self.p).collect();
        if d.len() > self.m as usize {
            // reduce a polynomial of higher degree modulo the modulus
            d = poly_rem(&d, &self.modulus, self.p);
        }
        d.resize(self.m as usize, 0);
        Fe(from_digits(&d, self.p) as u8)
    }
}

fn to_digits(mut r: u32, p: u32, m: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(r % p);
        r /= p;
    }
    out
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|b| a * b % p == 1).expect("nonzero residue mod a prime is invertible")
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Remainder of `a` divided by `b` over GF(p); `b` must have a nonzero leading coefficient.
pub(crate) fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    let mut r = trim(a.to_vec());
    while r.len() > db && r.len() >= b.len() {
        let dr = r.len() - 1;
        let factor = r[dr] * lead_inv % p;
        for (i, &bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - factor * bc % p) % p;
        }
        r.pop();
        r = trim(r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(modulus.len() - 1, 0);
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let poly = trim(poly.to_vec());
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0..(p as u64).pow(d as u32) {
            let mut divisor = to_digits(low as u32, p, d);
            divisor.push(1);
            let r = poly_rem(&poly, &divisor, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `m` over
/// GF(p), comparing coefficient tuples from the constant term up.
fn smallest_irreducible(p: u32, m: usize) -> Vec<u32> {
    // Enumerate (c0, c1, ..., c_{m-1}) with c0 most significant.
    let total = (p as u64).pow(m as u32);
    for idx in 0..total {
        let mut coeffs = to_digits(idx as u32, p, m);
        coeffs.reverse();
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
