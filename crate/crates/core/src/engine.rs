//! Exhaustive codeword enumeration.
//!
//! A message is a digit vector `(d_0, .., d_{k-1})` over GF(q) with index
//! `sum d_i q^i`. The lowest `t` digits are expanded once into an inner table
//! of `q^t` partial codewords; the remaining digits are walked in odometer
//! order, updating a running vector by one precomputed row delta per step.
//! The weight of `b + v` is the number of positions where `v` differs from
//! `-b`, which is a plain byte comparison.
//!
//! The outer range is split into contiguous blocks, one per worker, and the
//! per-worker visitors are merged in block order, so every result is identical
//! whatever the worker count.

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

/// Default ceiling on the number of codewords a scan may visit.
pub const MESSAGE_LIMIT: u128 = 10_000_000_000;

/// Largest inner table, in entries.
const INNER_LIMIT: usize = 4096;

/// Receives every codeword of a scan as `(message index, weight)`.
pub trait Visitor: Send {
    fn visit(&mut self, message: u64, weight: u32);

    /// Absorbs the visitor of the block that follows this one.
    fn merge(&mut self, next: Self)
    where
        Self: Sized;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
    /// Lift the [`MESSAGE_LIMIT`] guard.
    pub force: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { workers: 1, force: false }
    }
}

/// Number of messages for `k` rows over GF(q), refusing oversized scans.
pub fn check_guard(q: usize, k: usize, force: bool) -> Result<u64> {
    let count = (q as u128).pow(k as u32);
    if count > MESSAGE_LIMIT && !force {
        return Err(Error::SizeGuard { what: "codewords", count, limit: MESSAGE_LIMIT });
    }
    u64::try_from(count).map_err(|_| Error::SizeGuard { what: "codewords", count, limit: u64::MAX as u128 })
}

struct Plan<'a> {
    field: &'a Field,
    n: usize,
    q: usize,
    t: usize,
    /// Inner partial codewords, `q^t` rows of length `n`, flattened.
    inner: Vec<u8>,
    /// `neg_delta[i - t][d]`: what to add to `-b` when digit `i` steps from `d`
    /// to `d + 1 (mod q)`.
    neg_delta: Vec<Vec<Vec<u8>>>,
    rows: &'a [Vec<Fe>],
}

impl<'a> Plan<'a> {
    fn new(field: &'a Field, rows: &'a [Vec<Fe>], n: usize) -> Plan<'a> {
        let q = field.order();
        let k = rows.len();
        let mut t = 0;
        while t < k && q.pow(t as u32 + 1) <= INNER_LIMIT.max(q) {
            t += 1;
        }
        let size = q.pow(t as u32);
        let mut inner = vec![0u8; size * n];
        for idx in 0..size {
            let mut acc = vec![Fe::ZERO; n];
            let mut rem = idx;
            for row in rows.iter().take(t) {
                let c = Fe((rem % q) as u8);
                rem /= q;
                if !c.is_zero() {
                    for (a, &r) in acc.iter_mut().zip(row) {
                        *a = field.add(*a, field.mul(c, r));
                    }
                }
            }
            for (j, a) in acc.iter().enumerate() {
                inner[idx * n + j] = a.0;
            }
        }
        let neg_delta = rows[t..]
            .iter()
            .map(|row| {
                (0..q)
                    .map(|d| {
                        let step = field.sub(Fe(((d + 1) % q) as u8), Fe(d as u8));
                        row.iter().map(|&r| field.neg(field.mul(step, r)).0).collect()
                    })
                    .collect()
            })
            .collect();
        Plan { field, n, q, t, inner, neg_delta, rows }
    }

    fn outer_count(&self) -> u64 {
        (self.q as u64).pow((self.rows.len() - self.t) as u32)
    }

    fn run<V: Visitor>(&self, lo: u64, hi: u64, visitor: &mut V) {
        if lo >= hi {
            return;
        }
        let (field, n, q) = (self.field, self.n, self.q);
        let outer_rows = &self.rows[self.t..];
        let mut digits = vec![0usize; outer_rows.len()];
        let mut rem = lo;
        for d in digits.iter_mut() {
            *d = (rem % q as u64) as usize;
            rem /= q as u64;
        }
        let mut neg_b = vec![0u8; n];
        for (row, &d) in outer_rows.iter().zip(&digits) {
            if d != 0 {
                let c = Fe(d as u8);
                for (x, &r) in neg_b.iter_mut().zip(row) {
                    *x = field.sub(Fe(*x), field.mul(c, r)).0;
                }
            }
        }
        let add = field.add_table();
        let stride = (self.inner.len() / n) as u64;
        for outer in lo..hi {
            let base = outer * stride;
            for (v, chunk) in self.inner.chunks_exact(n).enumerate() {
                let w = chunk.iter().zip(&neg_b).map(|(a, b)| (a != b) as u32).sum();
                visitor.visit(base + v as u64, w);
            }
            // odometer step
            for (i, d) in digits.iter_mut().enumerate() {
                let delta = &self.neg_delta[i][*d];
                for (x, &y) in neg_b.iter_mut().zip(delta) {
                    *x = add[*x as usize * q + y as usize];
                }
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
        }
    }
}

/// Visits every message of the row space of `rows` (each of length `n`).
pub fn scan<V, F>(field: &Field, rows: &[Vec<Fe>], n: usize, opts: ScanOptions, make: F) -> Result<V>
where
    V: Visitor,
    F: Fn() -> V + Sync,
{
    check_guard(field.order(), rows.len(), opts.force)?;
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Internal("scan rows must be nonempty and of equal length".into()));
    }
    let plan = Plan::new(field, rows, n);
    let outer = plan.outer_count();
    let workers = (opts.workers.max(1) as u64).min(outer).max(1);
    if workers == 1 {
        let mut v = make();
        plan.run(0, outer, &mut v);
        return Ok(v);
    }
    let bounds: Vec<(u64, u64)> =
        (0..workers).map(|w| (outer * w / workers, outer * (w + 1) / workers)).collect();
    let parts: Vec<V> = std::thread::scope(|s| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let plan = &plan;
                let make = &make;
                s.spawn(move || {
                    let mut v = make();
                    plan.run(lo, hi, &mut v);
                    v
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let mut parts = parts.into_iter();
    let mut acc = parts.next().expect("at least one worker");
    for p in parts {
        acc.merge(p);
    }
    Ok(acc)
}

/// Weight histogram visitor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally(pub Vec<u64>);

impl Tally {
    pub fn new(n: usize) -> Tally {
        Tally(vec![0; n + 1])
    }
}

impl Visitor for Tally {
    #[inline]
    fn visit(&mut self, _message: u64, weight: u32) {
        self.0[weight as usize] += 1;
    }

    fn merge(&mut self, next: Self) {
        for (a, b) in self.0.iter_mut().zip(next.0) {
            *a += b;
        }
    }
}

/// Digits of a message index, least significant first.
pub fn message_digits(q: usize, k: usize, mut message: u64) -> Vec<Fe> {
    (0..k)
        .map(|_| {
            let d = Fe((message % q as u64) as u8);
            message /= q as u64;
            d
        })
        .collect()
}

/// Whether the first nonzero digit is 1, i.e. the message is the chosen
/// representative of its scalar class.
pub fn is_scalar_representative(q: usize, mut message: u64) -> bool {
    while message != 0 {
        let d = message % q as u64;
        if d != 0 {
            return d == 1;
        }
        message /= q as u64;
    }
    false
}
