//! The weighted prime-divisor decomposition of the typical-set indicator.
//!
//! For `P` the primes of the first ladder interval `[P_1, Q_1]`,
//!
//! ```text
//! 1_S(n) = sum over distinct primes p in P dividing n of
//!          1_{S'}(n) / (1 + #{distinct primes of n in P other than p})
//! ```
//!
//! so each term's denominator is the full count `#{q in P : q | n}` and the
//! sum telescopes to `1_{S'}(n) * 1_{some P-prime divides n}` exactly, for
//! every `n` — including those divisible by a square of a `P`-prime. The
//! right-hand side is evaluated in exact rational arithmetic and compared
//! against the directly computed indicator.

use crate::error::{Error, Result};
use crate::sieve::FactorSieve;
use crate::typical::IntervalSystem;

/// Exact fraction on `i64` with positive reduced denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd_i64(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Ratio { num: sign * num / g, den: sign.abs() * den.abs() / g }
    }

    pub fn zero() -> Ratio {
        Ratio { num: 0, den: 1 }
    }

    pub fn from_int(n: i64) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    pub fn add(self, other: Ratio) -> Ratio {
        let g = gcd_i64(self.den.unsigned_abs(), other.den.unsigned_abs()) as i64;
        let lhs_scale = other.den / g;
        let rhs_scale = self.den / g;
        Ratio::new(
            self.num
                .checked_mul(lhs_scale)
                .and_then(|a| other.num.checked_mul(rhs_scale).map(|b| a + b))
                .expect("ratio overflow"),
            self.den.checked_mul(lhs_scale).expect("ratio overflow"),
        )
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self, n: i64) -> bool {
        self.den == 1 && self.num == n
    }
}

fn gcd_i64(a: u64, b: u64) -> u64 {
    crate::util::gcd(a.max(1), b.max(1))
}

/// Both sides of the decomposition at `n`: `(1_S(n), rational right side)`.
pub fn ramare_decomposition(
    n: u64,
    sys: &IntervalSystem,
    sieve: &FactorSieve,
) -> Result<(u8, Ratio)> {
    if n < 1 || n > sys.x() {
        return Err(Error::domain(format!("n = {n} outside [1, X = {}]", sys.x())));
    }
    let factors = sieve.factorize(n)?;
    let first = &sys.rungs()[0];
    let omega_p: i64 = factors
        .iter()
        .filter(|&&(p, _)| p >= first.p && p <= first.q)
        .count() as i64;
    let s_prime = sys.rungs()[1..]
        .iter()
        .all(|r| factors.iter().any(|&(p, _)| p >= r.p && p <= r.q));
    let lhs = u8::from(s_prime && omega_p >= 1);
    let mut rhs = Ratio::zero();
    if s_prime {
        for &(p, _) in &factors {
            if p >= first.p && p <= first.q {
                // distinct P-primes of n with all copies of p removed
                let others = omega_p - 1;
                rhs = rhs.add(Ratio::new(1, 1 + others));
            }
        }
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::build_factor_sieve;

    #[test]
    fn ratio_arithmetic_is_exact() {
        let half = Ratio::new(1, 2);
        let third = Ratio::new(1, 3);
        assert_eq!(half.add(third), Ratio::new(5, 6));
        assert_eq!(Ratio::new(2, 4), Ratio::new(1, 2));
        assert!(half.add(half).is_integer(1));
        let sum = (0..7).fold(Ratio::zero(), |acc, _| acc.add(Ratio::new(1, 7)));
        assert!(sum.is_integer(1));
    }

    #[test]
    fn single_p_prime() {
        let sys = IntervalSystem::synthetic(&[(10, 50)], 10_000).unwrap();
        let fs = build_factor_sieve(1, 10_000).unwrap();
        // 22 = 2 * 11: one P-prime, term 1/(1+0)
        let (lhs, rhs) = ramare_decomposition(22, &sys, &fs).unwrap();
        assert_eq!(lhs, 1);
        assert!(rhs.is_integer(1));
    }

    #[test]
    fn two_p_primes_split_halves() {
        let sys = IntervalSystem::synthetic(&[(10, 50)], 10_000).unwrap();
        let fs = build_factor_sieve(1, 10_000).unwrap();
        // 143 = 11 * 13: two terms of 1/2
        let (lhs, rhs) = ramare_decomposition(143, &sys, &fs).unwrap();
        assert_eq!(lhs, 1);
        assert!(rhs.is_integer(1));
    }

    #[test]
    fn repeated_p_prime_still_exact() {
        let sys = IntervalSystem::synthetic(&[(10, 50)], 10_000).unwrap();
        let fs = build_factor_sieve(1, 10_000).unwrap();
        // 11^2 * 13 has a repeated P-prime
        let (lhs, rhs) = ramare_decomposition(1573, &sys, &fs).unwrap();
        assert_eq!(lhs, 1);
        assert!(rhs.is_integer(1), "rhs = {rhs:?}");
        // 11^3
        let (lhs, rhs) = ramare_decomposition(1331, &sys, &fs).unwrap();
        assert_eq!(lhs, 1);
        assert!(rhs.is_integer(1));
    }

    #[test]
    fn nonmembers_give_zero_both_sides() {
        let sys = IntervalSystem::synthetic(&[(10, 50)], 10_000).unwrap();
        let fs = build_factor_sieve(1, 10_000).unwrap();
        for n in [1u64, 8, 9, 14, 512] {
            // 14 = 2*7: 7 < 10 misses; 8, 9, 512 have no P-prime
            let (lhs, rhs) = ramare_decomposition(n, &sys, &fs).unwrap();
            assert_eq!(lhs, 0, "n = {n}");
            assert_eq!(rhs, Ratio::zero(), "n = {n}");
        }
    }

    #[test]
    fn exhaustive_equality_small_window() {
        let sys = IntervalSystem::synthetic(&[(10, 1_000)], 20_000).unwrap();
        let fs = build_factor_sieve(1, 20_000).unwrap();
        for n in 1..=20_000u64 {
            let (lhs, rhs) = ramare_decomposition(n, &sys, &fs).unwrap();
            assert!(rhs.is_integer(lhs as i64), "n = {n}: lhs {lhs}, rhs {rhs:?}");
        }
    }

    #[test]
    fn two_rung_ladder_uses_s_prime() {
        let sys = IntervalSystem::synthetic(&[(10, 50), (100, 200)], 100_000).unwrap();
        let fs = build_factor_sieve(1, 100_000).unwrap();
        // 11 * 101: in S, decomposition gives 1
        let (lhs, rhs) = ramare_decomposition(11 * 101, &sys, &fs).unwrap();
        assert_eq!(lhs, 1);
        assert!(rhs.is_integer(1));
        // 11 * 13: has P-primes but misses rung 2, so S' fails: both sides 0
        let (lhs, rhs) = ramare_decomposition(143, &sys, &fs).unwrap();
        assert_eq!(lhs, 0);
        assert_eq!(rhs, Ratio::zero());
    }
}
