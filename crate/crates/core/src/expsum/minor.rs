//! Computable kernels of the minor-arc argument: the truncated-geometric-sum
//! bound, four-prime representation counts, and the clipped reciprocal sum
//! over `||n alpha||`.

use crate::error::{Error, Result};
use crate::expsum::approx::dirichlet_approx;
use crate::sieve;
use crate::util::{dist_to_nearest_int, Kahan};

/// `sum_{n <= N} min(A, 1/||n alpha||)` with its comparison bound.
#[derive(Clone, Copy, Debug)]
pub struct VinogradovReport {
    pub sum: f64,
    /// Denominator of the Dirichlet approximation of `alpha` with cap `N`.
    pub q: u64,
    /// `(N/q + 1)(A + q ln q)`: the lemma's shape with constant 1.
    pub reference_bound: f64,
    pub ratio: f64,
}

/// Evaluate the clipped reciprocal sum; `||n alpha|| = 0` contributes `A`.
pub fn vinogradov_sum(n_max: u64, a_clip: f64, alpha: f64) -> Result<VinogradovReport> {
    if n_max < 1 {
        return Err(Error::precondition("N must be >= 1".to_string()));
    }
    if a_clip <= 0.0 {
        return Err(Error::precondition("clip A must be positive".to_string()));
    }
    let mut acc = Kahan::new();
    for n in 1..=n_max {
        let d = dist_to_nearest_int(n as f64 * alpha);
        let term = if d <= 1.0 / a_clip { a_clip } else { 1.0 / d };
        acc.add(term.min(a_clip));
    }
    finish_vinogradov(n_max, a_clip, alpha, acc.value())
}

/// Exact-denominator variant for rational `alpha = a/q`:
/// `||n a/q|| = min(r, q-r)/q` with `r = n a mod q`.
pub fn vinogradov_sum_rational(n_max: u64, a_clip: f64, a: u64, q: u64) -> Result<VinogradovReport> {
    if q < 1 {
        return Err(Error::precondition("q must be >= 1".to_string()));
    }
    let mut acc = Kahan::new();
    for n in 1..=n_max {
        let r = ((n as u128 * a as u128) % q as u128) as u64;
        let dist_num = r.min(q - r);
        let term = if dist_num == 0 {
            a_clip
        } else {
            (q as f64 / dist_num as f64).min(a_clip)
        };
        acc.add(term);
    }
    finish_vinogradov(n_max, a_clip, a as f64 / q as f64, acc.value())
}

fn finish_vinogradov(n_max: u64, a_clip: f64, alpha: f64, sum: f64) -> Result<VinogradovReport> {
    let approx = dirichlet_approx(alpha, n_max)?;
    let q = approx.q;
    let qf = q as f64;
    let reference_bound = (n_max as f64 / qf + 1.0) * (a_clip + qf * qf.ln());
    Ok(VinogradovReport { sum, q, reference_bound, ratio: sum / reference_bound })
}

/// Counts of `n = p1 + p2 - p3 - p4` over primes `p_i <= 2P`.
#[derive(Clone, Debug)]
pub struct ReprCounts {
    pub p: u64,
    /// Number of primes up to `2P`.
    pub prime_count: usize,
    /// `r[(n + offset) as usize]` is the representation count of `n`.
    pub counts: Vec<u64>,
    pub offset: i64,
    pub max_count: u64,
    /// `max_n r(n) / (P^3 / ln^4 P)`.
    pub max_ratio: f64,
}

impl ReprCounts {
    pub fn count(&self, n: i64) -> u64 {
        let idx = n + self.offset;
        if idx < 0 || idx as usize >= self.counts.len() {
            0
        } else {
            self.counts[idx as usize]
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Iterate `(n, r(n))` over nonzero entries.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i as i64 - self.offset, c))
    }
}

/// Tabulate `r(n) = #{(p1,p2,p3,p4) : p_i <= 2P prime, p1+p2-p3-p4 = n}` via
/// the pair-sum histogram: `r = corr(s, s)` with `s(k) = #{(p,p') : p+p'=k}`,
/// taming the quartic enumeration to two quadratic passes.
pub fn representation_counts(p: u64) -> Result<ReprCounts> {
    if p < 2 {
        return Err(Error::precondition("P must be >= 2".to_string()));
    }
    if p > 2_000 {
        return Err(Error::capacity(format!("P = {p} beyond the quartic-histogram cap 2000")));
    }
    let primes = sieve::primes_in(2, 2 * p)?;
    let max_sum = (4 * p) as usize;
    let mut pair = vec![0u64; max_sum + 1];
    for &p1 in &primes {
        for &p2 in &primes {
            pair[(p1 + p2) as usize] += 1;
        }
    }
    let offset = max_sum as i64;
    let mut counts = vec![0u64; 2 * max_sum + 1];
    for (k1, &c1) in pair.iter().enumerate() {
        if c1 == 0 {
            continue;
        }
        for (k2, &c2) in pair.iter().enumerate() {
            if c2 != 0 {
                counts[(k1 + max_sum - k2) as usize] += c1 * c2;
            }
        }
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let pf = p as f64;
    let scale = pf.powi(3) / pf.ln().powi(4);
    Ok(ReprCounts {
        p,
        prime_count: primes.len(),
        counts,
        offset,
        max_count,
        max_ratio: max_count as f64 / scale,
    })
}

/// `sum_{p1,p2,p3,p4 <= 2P} min(H/P, 1/||(p1+p2-p3-p4) alpha||)` evaluated
/// through the representation histogram.
pub fn min_sum_flask(counts: &ReprCounts, h: f64, alpha: f64) -> f64 {
    let clip = h / counts.p as f64;
    let mut acc = Kahan::new();
    for (n, r) in counts.iter_nonzero() {
        let d = dist_to_nearest_int(n as f64 * alpha);
        let term = if d == 0.0 { clip } else { (1.0 / d).min(clip) };
        acc.add(r as f64 * term);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vinogradov_half_small_case() {
        // alpha = 1/2, N = 4, A = 10: ||1/2|| = 1/2 -> 2, ||1|| = 0 -> A, ...
        let r = vinogradov_sum(4, 10.0, 0.5).unwrap();
        assert!((r.sum - 24.0).abs() < 1e-9, "sum = {}", r.sum);
    }

    #[test]
    fn vinogradov_single_term() {
        let alpha = std::f64::consts::FRAC_1_SQRT_2;
        let r = vinogradov_sum(1, 100.0, alpha).unwrap();
        let expect = (1.0 / dist_to_nearest_int(alpha)).min(100.0);
        assert!((r.sum - expect).abs() < 1e-9);
    }

    #[test]
    fn rational_and_float_paths_agree() {
        let (a, q) = (3u64, 7u64);
        let float = vinogradov_sum(500, 50.0, a as f64 / q as f64).unwrap();
        let exact = vinogradov_sum_rational(500, 50.0, a, q).unwrap();
        assert!((float.sum - exact.sum).abs() < 1e-6);
        assert_eq!(float.q, exact.q);
    }

    #[test]
    fn repr_counts_match_brute_force_small() {
        for p in [5u64, 11, 20] {
            let rc = representation_counts(p).unwrap();
            let primes = sieve::primes_in(2, 2 * p).unwrap();
            let mut brute = std::collections::HashMap::new();
            for &p1 in &primes {
                for &p2 in &primes {
                    for &p3 in &primes {
                        for &p4 in &primes {
                            let n = p1 as i64 + p2 as i64 - p3 as i64 - p4 as i64;
                            *brute.entry(n).or_insert(0u64) += 1;
                        }
                    }
                }
            }
            for (n, r) in rc.iter_nonzero() {
                assert_eq!(brute.get(&n).copied().unwrap_or(0), r, "P={p}, n={n}");
            }
            let total: u64 = brute.values().sum();
            assert_eq!(rc.total(), total);
            let pi = primes.len() as u64;
            assert_eq!(rc.total(), pi * pi * pi * pi, "total must be pi(2P)^4");
        }
    }

    #[test]
    fn repr_counts_symmetric() {
        let rc = representation_counts(50).unwrap();
        for (n, r) in rc.iter_nonzero() {
            assert_eq!(rc.count(-n), r, "r({n}) != r({})", -n);
        }
    }

    #[test]
    fn flask_at_zero_is_total_times_clip() {
        let rc = representation_counts(5).unwrap();
        let h = 100.0;
        let v = min_sum_flask(&rc, h, 0.0);
        let expect = rc.total() as f64 * (h / 5.0);
        assert!((v - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn flask_matches_brute_quadruple_loop() {
        let p = 5u64;
        let rc = representation_counts(p).unwrap();
        let h = 100.0;
        let alpha = 1.0 / 3.0;
        let via_hist = min_sum_flask(&rc, h, alpha);
        let primes = sieve::primes_in(2, 2 * p).unwrap();
        let clip = h / p as f64;
        let mut brute = 0.0;
        for &p1 in &primes {
            for &p2 in &primes {
                for &p3 in &primes {
                    for &p4 in &primes {
                        let n = p1 as f64 + p2 as f64 - p3 as f64 - p4 as f64;
                        let d = dist_to_nearest_int(n * alpha);
                        brute += if d == 0.0 { clip } else { (1.0 / d).min(clip) };
                    }
                }
            }
        }
        assert!((via_hist - brute).abs() < 1e-6 * brute, "{via_hist} vs {brute}");
    }
}
