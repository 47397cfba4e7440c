//! Segmented sieving over 64-bit ranges.
//!
//! Everything here works on an integer window `[lo, hi]` with `hi` capped at
//! [`MAX_N`], sieving with the base primes up to `sqrt(hi)`:
//!
//! * [`FactorSieve`] — smallest-prime-factor table, the backbone for
//!   factorization and divisibility tests;
//! * [`liouville_block`] / [`moebius_block`] — sign tables for
//!   `lambda(n) = (-1)^Omega(n)` (completely multiplicative, `lambda(p) = -1`)
//!   and the Moebius function `mu`;
//! * [`primes_in`] — the primes of a window, ascending.
//!
//! The sign sieves flip in place once per prime power (`lambda` needs the
//! exponent parity, not the factorization) and track the smooth part of each
//! entry so the single possible prime factor above `sqrt(hi)` is accounted
//! for at the end. Blocks are filled one cache-sized segment at a time;
//! segment builds are pure functions of the window, so disjoint segments can
//! be sieved in parallel by callers that want to.

use crate::error::{Error, Result};

/// Hard cap on sieve ranges: base primes up to `sqrt(MAX_N) = 10^5` stay tiny.
pub const MAX_N: u64 = 10_000_000_000;

/// Streaming segment granularity (entries), sized for cache friendliness.
pub const DEFAULT_SEGMENT: usize = 1 << 22;

/// Memory ceiling for a single materialized block.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub bytes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        // 2 GiB: enough for an i8 block of 10^9 entries or a u64 table of 2.6*10^8.
        Budget { bytes: 2 << 30 }
    }
}

fn check_range(lo: u64, hi: u64) -> Result<u64> {
    if lo < 1 {
        return Err(Error::domain(format!("range start {lo} must be >= 1")));
    }
    if hi < lo {
        return Err(Error::domain(format!("empty range [{lo}, {hi}]")));
    }
    if hi > MAX_N {
        return Err(Error::capacity(format!("range end {hi} exceeds cap {MAX_N}")));
    }
    Ok(hi - lo + 1)
}

fn check_budget(entries: u64, entry_bytes: usize, budget: Budget) -> Result<usize> {
    let need = entries.saturating_mul(entry_bytes as u64);
    if need > budget.bytes as u64 {
        return Err(Error::capacity(format!(
            "block of {entries} entries needs {need} bytes, budget is {}",
            budget.bytes
        )));
    }
    Ok(entries as usize)
}

/// All primes `<= limit` by a plain Eratosthenes sieve.
///
/// Used for base primes (`limit <= sqrt(MAX_N)`) and for small prime lists.
pub fn simple_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

fn base_primes_for(hi: u64) -> Vec<u64> {
    simple_primes((hi as f64).sqrt() as u64 + 1)
}

/// First multiple of `p` that is `>= lo`.
#[inline]
fn first_multiple(p: u64, lo: u64) -> u64 {
    lo.div_ceil(p) * p
}

/// Smallest-prime-factor table for `[lo, hi]`.
///
/// `spf(n)` is the least prime dividing `n`; `spf(n) == n` exactly when `n`
/// is prime, and the entry for `n = 1` is the sentinel value 1.
pub struct FactorSieve {
    lo: u64,
    hi: u64,
    spf: Vec<u64>,
    base: Vec<u64>,
}

/// Build the smallest-prime-factor table for `[lo, hi]`.
pub fn build_factor_sieve(lo: u64, hi: u64) -> Result<FactorSieve> {
    build_factor_sieve_with(lo, hi, Budget::default())
}

pub fn build_factor_sieve_with(lo: u64, hi: u64, budget: Budget) -> Result<FactorSieve> {
    let entries = check_range(lo, hi)?;
    let len = check_budget(entries, 8, budget)?;
    let base = base_primes_for(hi);
    let mut spf = vec![0u64; len];
    for &p in &base {
        let mut m = first_multiple(p, lo);
        while m <= hi {
            let idx = (m - lo) as usize;
            if spf[idx] == 0 {
                spf[idx] = p;
            }
            m += p;
        }
    }
    for (i, slot) in spf.iter_mut().enumerate() {
        if *slot == 0 {
            let n = lo + i as u64;
            // untouched: n is 1 or a prime (all composites <= hi have a
            // factor <= sqrt(hi))
            *slot = if n == 1 { 1 } else { n };
        }
    }
    Ok(FactorSieve { lo, hi, spf, base })
}

impl FactorSieve {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Base primes up to `sqrt(hi)` used to build this sieve.
    pub fn base_primes(&self) -> &[u64] {
        &self.base
    }

    /// Smallest prime factor of `n` (sentinel 1 for `n = 1`).
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < self.lo || n > self.hi {
            return Err(Error::domain(format!(
                "{n} outside sieve range [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(self.spf[(n - self.lo) as usize])
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        Ok(n >= 2 && self.spf(n)? == n)
    }

    /// Factor `n` into `(prime, exponent)` pairs with strictly increasing primes.
    ///
    /// Works for any `n <= hi`, not just window members: the stored table
    /// seeds the search when `n` is in the window, and trial division by the
    /// base primes finishes the job (quotients fall below `lo` in general).
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n < 1 || n > self.hi {
            return Err(Error::domain(format!("{n} outside factorizable range [1, {}]", self.hi)));
        }
        if n == 1 {
            return Ok(Vec::new());
        }
        let mut rem = n;
        let mut out = Vec::new();
        let mut start_idx = 0usize;
        if n >= self.lo {
            let p = self.spf[(n - self.lo) as usize];
            if p == n {
                return Ok(vec![(n, 1)]);
            }
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            out.push((p, e));
            start_idx = self.base.partition_point(|&q| q <= p);
        }
        for &p in &self.base[start_idx..] {
            if p * p > rem {
                break;
            }
            if rem % p == 0 {
                let mut e = 0u32;
                while rem % p == 0 {
                    rem /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if rem > 1 {
            out.push((rem, 1));
        }
        Ok(out)
    }
}

/// Which sign function a [`SignBlock`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    Liouville,
    Moebius,
}

/// Values of `lambda` or `mu` over an integer window, one `i8` per entry.
pub struct SignBlock {
    pub lo: u64,
    pub hi: u64,
    pub mode: SignMode,
    pub values: Vec<i8>,
}

impl SignBlock {
    #[inline]
    pub fn value(&self, n: u64) -> i8 {
        debug_assert!(n >= self.lo && n <= self.hi);
        self.values[(n - self.lo) as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `lambda(n) = (-1)^Omega(n)` for `n` in `[lo, hi]`.
pub fn liouville_block(lo: u64, hi: u64) -> Result<SignBlock> {
    sign_block_with(lo, hi, SignMode::Liouville, Budget::default())
}

/// `mu(n)` for `n` in `[lo, hi]` (`0` on non-squarefree `n`).
pub fn moebius_block(lo: u64, hi: u64) -> Result<SignBlock> {
    sign_block_with(lo, hi, SignMode::Moebius, Budget::default())
}

pub fn sign_block_with(lo: u64, hi: u64, mode: SignMode, budget: Budget) -> Result<SignBlock> {
    let entries = check_range(lo, hi)?;
    // i8 output plus the transient u64 smooth-part array per segment
    let len = check_budget(entries, 1, budget)?;
    let base = base_primes_for(hi);
    let mut values = vec![0i8; len];
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = (seg_lo + DEFAULT_SEGMENT as u64 - 1).min(hi);
        let off = (seg_lo - lo) as usize;
        let seg = &mut values[off..off + (seg_hi - seg_lo + 1) as usize];
        match mode {
            SignMode::Liouville => liouville_segment(seg_lo, seg_hi, &base, seg),
            SignMode::Moebius => moebius_segment(seg_lo, seg_hi, &base, seg),
        }
        seg_lo = seg_hi + 1;
    }
    Ok(SignBlock { lo, hi, mode, values })
}

fn liouville_segment(lo: u64, hi: u64, base: &[u64], out: &mut [i8]) {
    let len = out.len();
    let mut smooth = vec![1u64; len];
    out.fill(1);
    for &p in base {
        if p > hi {
            break;
        }
        // one flip pass per prime power p^k <= hi: n with p^e || n flips e times
        let mut pk = p;
        loop {
            let mut m = first_multiple(pk, lo);
            while m <= hi {
                let i = (m - lo) as usize;
                out[i] = -out[i];
                smooth[i] *= p;
                m += pk;
            }
            if pk > hi / p {
                break;
            }
            pk *= p;
        }
    }
    for (i, s) in smooth.iter().enumerate() {
        // a residual above sqrt(hi) is a single prime: one more flip
        if *s < lo + i as u64 {
            out[i] = -out[i];
        }
    }
}

fn moebius_segment(lo: u64, hi: u64, base: &[u64], out: &mut [i8]) {
    let len = out.len();
    let mut smooth = vec![1u64; len];
    let mut squareful = vec![false; len];
    out.fill(1);
    for &p in base {
        if p > hi {
            break;
        }
        let mut m = first_multiple(p, lo);
        while m <= hi {
            let i = (m - lo) as usize;
            out[i] = -out[i];
            smooth[i] *= p;
            m += p;
        }
        if let Some(p2) = p.checked_mul(p) {
            let mut m = first_multiple(p2, lo);
            while m <= hi {
                squareful[(m - lo) as usize] = true;
                m += p2;
            }
        }
    }
    for i in 0..len {
        if squareful[i] {
            out[i] = 0;
        } else if smooth[i] < lo + i as u64 {
            // one squarefree prime above sqrt(hi) remains
            out[i] = -out[i];
        }
    }
}

/// The primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_with(lo, hi, Budget::default())
}

pub fn primes_in_with(lo: u64, hi: u64, budget: Budget) -> Result<Vec<u64>> {
    let entries = check_range(lo, hi)?;
    check_budget(entries, 1, budget)?;
    let base = base_primes_for(hi);
    let mut primes = Vec::new();
    let mut seg_lo = lo;
    let mut composite = vec![false; DEFAULT_SEGMENT.min(entries as usize)];
    while seg_lo <= hi {
        let seg_hi = (seg_lo + DEFAULT_SEGMENT as u64 - 1).min(hi);
        let seg_len = (seg_hi - seg_lo + 1) as usize;
        composite[..seg_len].fill(false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut m = first_multiple(p, seg_lo).max(p * p);
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite[..seg_len].iter().enumerate() {
            let n = seg_lo + i as u64;
            if n >= 2 && !c {
                primes.push(n);
            }
        }
        seg_lo = seg_hi + 1;
    }
    Ok(primes)
}

/// Number of distinct prime factors of `n` with multiplicity (`Omega`),
/// by trial division. Test oracle and small-argument helper.
pub fn big_omega_naive(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_window_2_to_12() {
        let s = build_factor_sieve(2, 12).unwrap();
        let got: Vec<u64> = (2..=12).map(|n| s.spf(n).unwrap()).collect();
        assert_eq!(got, vec![2, 3, 2, 5, 2, 7, 2, 3, 2, 11, 2]);
    }

    #[test]
    fn spf_unit_sentinel() {
        let s = build_factor_sieve(1, 1).unwrap();
        assert_eq!(s.spf(1).unwrap(), 1);
        assert!(!s.is_prime(1).unwrap());
    }

    #[test]
    fn spf_million_window_matches_trial_division() {
        let lo = 1_000_000;
        let hi = 1_000_010;
        let s = build_factor_sieve(lo, hi).unwrap();
        for n in lo..=hi {
            let mut expect = n;
            let mut d = 2u64;
            while d * d <= n {
                if n % d == 0 {
                    expect = d;
                    break;
                }
                d += 1;
            }
            assert_eq!(s.spf(n).unwrap(), expect, "spf({n})");
        }
        assert_eq!(s.spf(1_000_000).unwrap(), 2);
    }

    #[test]
    fn spf_rejects_bad_ranges() {
        assert!(matches!(build_factor_sieve(0, 5), Err(Error::Domain(_))));
        assert!(matches!(build_factor_sieve(5, 4), Err(Error::Domain(_))));
        assert!(matches!(
            build_factor_sieve(1, MAX_N + 1),
            Err(Error::Capacity(_))
        ));
        let tiny = Budget { bytes: 16 };
        assert!(matches!(
            build_factor_sieve_with(1, 1000, tiny),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn liouville_small_values() {
        let b = liouville_block(1, 16).unwrap();
        // lambda(1)=+1, lambda(12)=lambda(2^2*3)=(-1)^3=-1
        assert_eq!(b.value(1), 1);
        assert_eq!(b.value(2), -1);
        assert_eq!(b.value(4), 1);
        assert_eq!(b.value(12), -1);
        for n in 1..=16 {
            let expect = if big_omega_naive(n) % 2 == 0 { 1 } else { -1 };
            assert_eq!(b.value(n), expect, "lambda({n})");
        }
    }

    #[test]
    fn moebius_small_values() {
        let b = moebius_block(1, 12).unwrap();
        assert_eq!(b.value(1), 1);
        assert_eq!(b.value(4), 0);
        assert_eq!(b.value(6), 1);
        assert_eq!(b.value(12), 0);
        assert_eq!(b.value(10), 1);
        assert_eq!(b.value(7), -1);
    }

    #[test]
    fn primes_in_windows() {
        assert_eq!(
            primes_in(10, 50).unwrap(),
            vec![11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
        assert!(primes_in(1, 1).unwrap().is_empty());
        assert_eq!(primes_in(2, 2).unwrap(), vec![2]);
    }

    #[test]
    fn factorize_basics() {
        let s = build_factor_sieve(1, 100).unwrap();
        assert_eq!(s.factorize(60).unwrap(), vec![(2, 2), (3, 1), (5, 1)]);
        assert!(s.factorize(1).unwrap().is_empty());
        assert_eq!(s.factorize(97).unwrap(), vec![(97, 1)]);
    }

    #[test]
    fn factorize_out_of_range_is_domain_error() {
        let s = build_factor_sieve(1, 100).unwrap();
        assert!(matches!(s.factorize(101), Err(Error::Domain(_))));
        assert!(matches!(s.factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn liouville_segmentation_transparency() {
        // concatenated segments must equal the single-block result
        let whole = liouville_block(1, 30_000).unwrap();
        let parts = [
            liouville_block(1, 9_999).unwrap(),
            liouville_block(10_000, 24_567).unwrap(),
            liouville_block(24_568, 30_000).unwrap(),
        ];
        let mut n = 1;
        for part in &parts {
            for i in 0..part.len() {
                assert_eq!(part.values[i], whole.value(n), "n = {n}");
                n += 1;
            }
        }
        assert_eq!(n, 30_001);
    }

    #[test]
    fn lambda_mu_agree_on_squarefree() {
        let lam = liouville_block(1, 5_000).unwrap();
        let mu = moebius_block(1, 5_000).unwrap();
        for n in 1..=5_000 {
            let m = mu.value(n);
            if m != 0 {
                assert_eq!(lam.value(n), m, "n = {n} squarefree");
            }
        }
    }
}
