//! Segmented computation of the additive/multiplicative bookkeeping functions
//! omega (distinct prime divisors), big omega (prime divisors with
//! multiplicity), the Liouville sign, and the Moebius function.
//!
//! Two independent routes exist on purpose. [`sieve_block`] is the fast
//! segmented route used by every estimator; [`factorize`] is a direct trial
//! division that the test suite replays against the sieve. Do not make one
//! call the other.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use rayon::prelude::*;

/// Streaming segment length. A multiple of 64 so parallel table builders can
/// write disjoint words.
pub const SEGMENT_LEN: u64 = 1 << 20;

/// Hard cap on a single materialized block (about 64 MiB of per-value state).
pub const BLOCK_BUDGET: u64 = 1 << 24;

/// Prime-power factorization `n = prod p_i^{e_i}` with `p_i` strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePowerFactorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl PrimePowerFactorization {
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn liouville(&self) -> i8 {
        if self.big_omega() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn mobius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else {
            self.liouville()
        }
    }
}

/// Trial division. Exact for every `n >= 1`; quadratic-root cost, so this is
/// the cross-check route, not the bulk route.
pub fn factorize(n: u64) -> PrimePowerFactorization {
    assert!(n >= 1, "factorize is defined on positive integers");
    let mut m = n;
    let mut factors = Vec::new();
    let mut d: u64 = 2;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    PrimePowerFactorization { n, factors }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).factors == vec![(n, 1)]
}

/// All primes `<= s` in increasing order.
pub fn primes_up_to(s: u64) -> Vec<u64> {
    if s < 2 {
        return Vec::new();
    }
    let s_us = s as usize;
    let mut composite = vec![false; s_us + 1];
    let mut primes = Vec::new();
    for p in 2..=s_us {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= s_us {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// `L(S) = sum_{p <= S} 1/p`, compensated, in increasing prime order.
pub fn prime_harmonic(s: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for p in primes_up_to(s) {
        acc.add(1.0 / p as f64);
    }
    acc.sum()
}

/// Per-value arithmetic data for the inclusive range `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ArithmeticBlock {
    pub lo: u64,
    pub hi: u64,
    pub omega: Vec<u8>,
    pub big_omega: Vec<u8>,
    pub liouville: Vec<i8>,
    pub mobius: Vec<i8>,
}

impl ArithmeticBlock {
    #[inline]
    fn idx(&self, n: u64) -> usize {
        debug_assert!(n >= self.lo && n <= self.hi, "n={n} outside [{}, {}]", self.lo, self.hi);
        (n - self.lo) as usize
    }

    #[inline]
    pub fn omega(&self, n: u64) -> u8 {
        self.omega[self.idx(n)]
    }

    #[inline]
    pub fn big_omega(&self, n: u64) -> u8 {
        self.big_omega[self.idx(n)]
    }

    #[inline]
    pub fn liouville(&self, n: u64) -> i8 {
        self.liouville[self.idx(n)]
    }

    #[inline]
    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[self.idx(n)]
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// Sieve omega / big omega counts for `[lo, hi]` given base primes covering
/// `sqrt(hi)`. Every entry's leftover cofactor after the base pass is either 1
/// or a single prime `> sqrt(hi)`.
fn sieve_counts(lo: u64, hi: u64, base: &[u64], omega: &mut [u8], big_omega: &mut [u8], rest: &mut [u64]) {
    let len = (hi - lo + 1) as usize;
    omega[..len].fill(0);
    big_omega[..len].fill(0);
    for (i, r) in rest[..len].iter_mut().enumerate() {
        *r = lo + i as u64;
    }
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0u8;
            while rest[i] % p == 0 {
                rest[i] /= p;
                e += 1;
            }
            omega[i] += 1;
            big_omega[i] += e;
            m += p;
        }
    }
    for i in 0..len {
        if rest[i] > 1 {
            omega[i] += 1;
            big_omega[i] += 1;
        }
    }
}

fn block_from_counts(lo: u64, hi: u64, omega: Vec<u8>, big_omega: Vec<u8>) -> ArithmeticBlock {
    let len = (hi - lo + 1) as usize;
    let mut liouville = vec![0i8; len];
    let mut mobius = vec![0i8; len];
    for i in 0..len {
        let l = if big_omega[i] % 2 == 0 { 1 } else { -1 };
        liouville[i] = l;
        mobius[i] = if omega[i] == big_omega[i] { l } else { 0 };
    }
    ArithmeticBlock { lo, hi, omega, big_omega, liouville, mobius }
}

/// Segmented sieve over `[lo, hi]`, bounded by [`BLOCK_BUDGET`].
pub fn sieve_block(lo: u64, hi: u64) -> Result<ArithmeticBlock> {
    if lo < 1 || lo > hi {
        return Err(Error::domain(format!("sieve_block needs 1 <= lo <= hi, got [{lo}, {hi}]")));
    }
    if hi >= 1 << 62 {
        return Err(Error::Overflow { what: "sieve_block upper bound" });
    }
    let len = hi - lo + 1;
    if len > BLOCK_BUDGET {
        return Err(Error::RangeTooLarge { len, budget: BLOCK_BUDGET });
    }
    let base = primes_up_to(isqrt_u64(hi));
    let mut omega = vec![0u8; len as usize];
    let mut big_omega = vec![0u8; len as usize];
    let mut rest = vec![0u64; len as usize];
    sieve_counts(lo, hi, &base, &mut omega, &mut big_omega, &mut rest);
    Ok(block_from_counts(lo, hi, omega, big_omega))
}

/// Deterministic partition of `[lo, hi]` into [`SEGMENT_LEN`]-sized pieces.
/// This partition is a pure function of the range, never of the thread count,
/// so parallel runs merge the same partials in the same order.
pub fn fixed_segments(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    assert!(lo >= 1 && lo <= hi);
    let mut out = Vec::with_capacity(((hi - lo) / SEGMENT_LEN + 1) as usize);
    let mut a = lo;
    while a <= hi {
        let b = hi.min(a + SEGMENT_LEN - 1);
        out.push((a, b));
        a = b + 1;
    }
    out
}

/// Monotone-access view of the sieve: callers ask for values at a
/// nondecreasing sequence of indices and the cursor sieves segments on demand.
pub struct BlockCursor {
    block: Option<ArithmeticBlock>,
    base: Vec<u64>,
    base_limit: u64,
    seg_len: u64,
}

impl BlockCursor {
    pub fn new() -> Self {
        BlockCursor { block: None, base: Vec::new(), base_limit: 0, seg_len: SEGMENT_LEN }
    }

    pub fn with_segment_len(seg_len: u64) -> Self {
        assert!(seg_len >= 1 && seg_len <= BLOCK_BUDGET);
        BlockCursor { block: None, base: Vec::new(), base_limit: 0, seg_len }
    }

    fn ensure(&mut self, n: u64) -> &ArithmeticBlock {
        let need_new = match &self.block {
            Some(b) => n < b.lo || n > b.hi,
            None => true,
        };
        if need_new {
            let lo = n;
            let hi = n + self.seg_len - 1;
            let root = isqrt_u64(hi);
            if root > self.base_limit {
                // Grow with headroom so repeated small extensions stay cheap.
                self.base_limit = (root * 2).max(1 << 10);
                self.base = primes_up_to(self.base_limit);
            }
            let len = self.seg_len as usize;
            let mut omega = vec![0u8; len];
            let mut big_omega = vec![0u8; len];
            let mut rest = vec![0u64; len];
            sieve_counts(lo, hi, &self.base, &mut omega, &mut big_omega, &mut rest);
            self.block = Some(block_from_counts(lo, hi, omega, big_omega));
        }
        self.block.as_ref().unwrap()
    }

    pub fn omega(&mut self, n: u64) -> u8 {
        self.ensure(n).omega(n)
    }

    pub fn big_omega(&mut self, n: u64) -> u8 {
        self.ensure(n).big_omega(n)
    }

    pub fn liouville(&mut self, n: u64) -> i8 {
        self.ensure(n).liouville(n)
    }

    pub fn mobius(&mut self, n: u64) -> i8 {
        self.ensure(n).mobius(n)
    }
}

impl Default for BlockCursor {
    fn default() -> Self {
        Self::new()
    }
}

/// Bit-packed Liouville or Moebius values for `1..=limit`, built in parallel
/// over the fixed segment partition. Used when estimators need point lookups
/// across ranges far too large to hold byte-per-value.
pub struct SignTable {
    limit: u64,
    /// bit n set <=> value at n is -1
    neg: Vec<u64>,
    /// bit n set <=> value at n is 0 (Moebius only)
    zero: Option<Vec<u64>>,
}

impl SignTable {
    fn build(limit: u64, with_zero: bool) -> Self {
        assert!(limit >= 1);
        let words = (limit / 64 + 1) as usize;
        let mut neg = vec![0u64; words];
        let mut zero = if with_zero { Some(vec![0u64; words]) } else { None };
        let base = primes_up_to(isqrt_u64(limit));

        // Segments start at multiples of SEGMENT_LEN (which is 64-aligned), so
        // each parallel piece owns a disjoint word range.
        let mut seg_starts = Vec::new();
        let mut a = 0u64;
        while a <= limit {
            seg_starts.push(a);
            a += SEGMENT_LEN;
        }
        let pieces: Vec<(usize, Vec<u64>, Option<Vec<u64>>)> = seg_starts
            .par_iter()
            .map(|&start| {
                let lo = start.max(1);
                let hi = limit.min(start + SEGMENT_LEN - 1);
                let word_lo = (start / 64) as usize;
                let word_count = ((hi / 64) as usize) - word_lo + 1;
                let mut neg_w = vec![0u64; word_count];
                let mut zero_w = if with_zero { Some(vec![0u64; word_count]) } else { None };
                if lo <= hi {
                    let len = (hi - lo + 1) as usize;
                    let mut omega = vec![0u8; len];
                    let mut big_omega = vec![0u8; len];
                    let mut rest = vec![0u64; len];
                    sieve_counts(lo, hi, &base, &mut omega, &mut big_omega, &mut rest);
                    for i in 0..len {
                        let n = lo + i as u64;
                        let w = (n / 64) as usize - word_lo;
                        let b = n % 64;
                        if big_omega[i] % 2 == 1 {
                            neg_w[w] |= 1 << b;
                        }
                        if let Some(z) = zero_w.as_mut() {
                            if omega[i] != big_omega[i] {
                                z[w] |= 1 << b;
                            }
                        }
                    }
                }
                (word_lo, neg_w, zero_w)
            })
            .collect();
        for (word_lo, neg_w, zero_w) in pieces {
            neg[word_lo..word_lo + neg_w.len()].copy_from_slice(&neg_w);
            if let (Some(z), Some(zw)) = (zero.as_mut(), zero_w) {
                z[word_lo..word_lo + zw.len()].copy_from_slice(&zw);
            }
        }
        SignTable { limit, neg, zero }
    }

    pub fn liouville(limit: u64) -> Self {
        Self::build(limit, false)
    }

    pub fn mobius(limit: u64) -> Self {
        Self::build(limit, true)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn get(&self, n: u64) -> i8 {
        debug_assert!(n >= 1 && n <= self.limit);
        let w = (n / 64) as usize;
        let b = n % 64;
        if let Some(z) = &self.zero {
            if (z[w] >> b) & 1 == 1 {
                return 0;
            }
        }
        if (self.neg[w] >> b) & 1 == 1 {
            -1
        } else {
            1
        }
    }
}
