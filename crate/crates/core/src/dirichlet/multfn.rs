//! 1-bounded multiplicative functions given by their values at primes.
//!
//! A [`MultFn`] is a value oracle `p -> f(p)` with `|f(p)| <= 1`, plus a
//! prime-power rule when the function is multiplicative but not completely
//! multiplicative (`mu` vanishes on higher prime powers, for instance).
//! Values at arbitrary `n` come from the factorization; bulk evaluation over
//! a window runs a residual-array sieve so a length-`L` window costs
//! `O(L log log L)` divisions rather than a factorization per entry.

use crate::dirichlet::character::DirichletCharacter;
use crate::error::{Error, Result};
use crate::sieve::{self, SignMode};
use crate::util::unit_power;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

type PrimeFn = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;
type PrimePowerFn = Arc<dyn Fn(u64, u32) -> Complex64 + Send + Sync>;

/// Tags for the instances with dedicated fast evaluation paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    One,
    Liouville,
    Moebius,
    MoebiusSquared,
    Generic,
}

/// A 1-bounded multiplicative function.
#[derive(Clone)]
pub struct MultFn {
    name: String,
    kind: Kind,
    completely_multiplicative: bool,
    real_valued: bool,
    prime: PrimeFn,
    /// `f(p^e)` for multiplicative-but-not-completely instances.
    prime_power: Option<PrimePowerFn>,
}

impl std::fmt::Debug for MultFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultFn")
            .field("name", &self.name)
            .field("completely_multiplicative", &self.completely_multiplicative)
            .finish()
    }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl MultFn {
    /// The constant function 1.
    pub fn one() -> MultFn {
        MultFn {
            name: "one".to_string(),
            kind: Kind::One,
            completely_multiplicative: true,
            real_valued: true,
            prime: Arc::new(|_| ONE),
            prime_power: None,
        }
    }

    /// Liouville `lambda`: completely multiplicative, `lambda(p) = -1`.
    pub fn liouville() -> MultFn {
        MultFn {
            name: "liouville".to_string(),
            kind: Kind::Liouville,
            completely_multiplicative: true,
            real_valued: true,
            prime: Arc::new(|_| Complex64::new(-1.0, 0.0)),
            prime_power: None,
        }
    }

    /// Moebius `mu`: multiplicative, vanishes on non-squarefree arguments.
    pub fn moebius() -> MultFn {
        MultFn {
            name: "moebius".to_string(),
            kind: Kind::Moebius,
            completely_multiplicative: false,
            real_valued: true,
            prime: Arc::new(|_| Complex64::new(-1.0, 0.0)),
            prime_power: Some(Arc::new(|_, e| {
                if e == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })),
        }
    }

    /// `mu^2`: the squarefree indicator.
    pub fn moebius_squared() -> MultFn {
        MultFn {
            name: "moebius-squared".to_string(),
            kind: Kind::MoebiusSquared,
            completely_multiplicative: false,
            real_valued: true,
            prime: Arc::new(|_| ONE),
            prime_power: Some(Arc::new(|_, e| {
                if e == 1 {
                    ONE
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })),
        }
    }

    /// A Dirichlet character as a completely multiplicative function.
    pub fn character(chi: &DirichletCharacter) -> MultFn {
        let real = chi.is_real();
        let chi = chi.clone();
        MultFn {
            name: format!("char:{}:{}", chi.modulus(), chi.index()),
            kind: Kind::Generic,
            completely_multiplicative: true,
            real_valued: real,
            prime: Arc::new(move |p| chi.eval(p)),
            prime_power: None,
        }
    }

    /// The archimedean character `n -> n^{it}`.
    pub fn archimedean(t: f64) -> MultFn {
        MultFn {
            name: format!("twist:{t}"),
            kind: Kind::Generic,
            completely_multiplicative: true,
            real_valued: t == 0.0,
            prime: Arc::new(move |p| unit_power(p, t)),
            prime_power: None,
        }
    }

    /// `f * conj(chi)`: the twist appearing inside character-aware distance
    /// minimization.
    pub fn twisted_by_conj(f: &MultFn, chi: &DirichletCharacter) -> MultFn {
        let name = format!("{}*conj({})", f.name, chi.modulus());
        let real = f.real_valued && chi.is_real();
        let complete = f.completely_multiplicative;
        let fp = f.prime.clone();
        let fpp = f.prime_power.clone();
        let chi_p = chi.clone();
        let prime: PrimeFn = {
            let chi = chi_p.clone();
            let fp = fp.clone();
            Arc::new(move |p| fp(p) * chi.eval(p).conj())
        };
        let prime_power: Option<PrimePowerFn> = fpp.map(|fpp| {
            let chi = chi_p;
            let f: PrimePowerFn = Arc::new(move |p, e| {
                let c = chi.eval(p).conj();
                fpp(p, e) * c.powi(e as i32)
            });
            f
        });
        MultFn {
            name,
            kind: Kind::Generic,
            completely_multiplicative: complete,
            real_valued: real,
            prime,
            prime_power,
        }
    }

    /// Completely multiplicative function from an explicit prime-value map;
    /// unassigned primes take `default`.
    pub fn from_prime_values(
        name: impl Into<String>,
        values: HashMap<u64, Complex64>,
        default: Complex64,
    ) -> Result<MultFn> {
        if default.norm() > 1.0 + 1e-12 {
            return Err(Error::precondition("default prime value exceeds the unit disc".to_string()));
        }
        for (p, v) in &values {
            if v.norm() > 1.0 + 1e-12 {
                return Err(Error::precondition(format!("value at p = {p} exceeds the unit disc")));
            }
        }
        let real = default.im == 0.0 && values.values().all(|v| v.im == 0.0);
        Ok(MultFn {
            name: name.into(),
            kind: Kind::Generic,
            completely_multiplicative: true,
            real_valued: real,
            prime: Arc::new(move |p| values.get(&p).copied().unwrap_or(default)),
            prime_power: None,
        })
    }

    /// Multiplicative function from closures (used by the iterative
    /// construction in [`crate::counterexample`]).
    pub fn from_closures(
        name: impl Into<String>,
        completely_multiplicative: bool,
        real_valued: bool,
        prime: PrimeFn,
        prime_power: Option<PrimePowerFn>,
    ) -> MultFn {
        MultFn {
            name: name.into(),
            kind: Kind::Generic,
            completely_multiplicative,
            real_valued,
            prime,
            prime_power,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// `f(p)` at a prime.
    pub fn prime_value(&self, p: u64) -> Complex64 {
        (self.prime)(p)
    }

    /// `f(p^e)`.
    pub fn prime_power_value(&self, p: u64, e: u32) -> Complex64 {
        if self.completely_multiplicative {
            self.prime_value(p).powi(e as i32)
        } else {
            match &self.prime_power {
                Some(f) => f(p, e),
                None => self.prime_value(p).powi(e as i32),
            }
        }
    }

    /// Value at `n` from an explicit factorization.
    pub fn value_at_factored(&self, factors: &[(u64, u32)]) -> Complex64 {
        factors
            .iter()
            .fold(ONE, |acc, &(p, e)| acc * self.prime_power_value(p, e))
    }

    /// Values over `[lo, hi]` via a residual-array sieve.
    pub fn eval_range(&self, lo: u64, hi: u64) -> Result<Vec<Complex64>> {
        if lo < 1 || hi < lo {
            return Err(Error::domain(format!("bad evaluation window [{lo}, {hi}]")));
        }
        if hi > sieve::MAX_N {
            return Err(Error::capacity(format!("window end {hi} exceeds cap {}", sieve::MAX_N)));
        }
        // sign-table fast paths
        match self.kind {
            Kind::One => return Ok(vec![ONE; (hi - lo + 1) as usize]),
            Kind::Liouville | Kind::Moebius | Kind::MoebiusSquared => {
                let mode = if self.kind == Kind::Liouville {
                    SignMode::Liouville
                } else {
                    SignMode::Moebius
                };
                let block = sieve::sign_block_with(lo, hi, mode, sieve::Budget::default())?;
                let square = self.kind == Kind::MoebiusSquared;
                return Ok(block
                    .values
                    .iter()
                    .map(|&v| {
                        let v = if square { (v * v) as f64 } else { v as f64 };
                        Complex64::new(v, 0.0)
                    })
                    .collect());
            }
            Kind::Generic => {}
        }
        let len = (hi - lo + 1) as usize;
        let mut out = vec![ONE; len];
        let base = sieve::simple_primes((hi as f64).sqrt() as u64 + 1);
        let mut seg_lo = lo;
        let mut residual = vec![0u64; sieve::DEFAULT_SEGMENT.min(len)];
        while seg_lo <= hi {
            let seg_hi = (seg_lo + sieve::DEFAULT_SEGMENT as u64 - 1).min(hi);
            let seg_len = (seg_hi - seg_lo + 1) as usize;
            for (i, r) in residual[..seg_len].iter_mut().enumerate() {
                *r = seg_lo + i as u64;
            }
            let off = (seg_lo - lo) as usize;
            let seg = &mut out[off..off + seg_len];
            for &p in &base {
                if p > seg_hi {
                    break;
                }
                let mut m = seg_lo.div_ceil(p) * p;
                while m <= seg_hi {
                    let i = (m - seg_lo) as usize;
                    let mut e = 0u32;
                    while residual[i] % p == 0 {
                        residual[i] /= p;
                        e += 1;
                    }
                    seg[i] *= self.prime_power_value(p, e);
                    m += p;
                }
            }
            for i in 0..seg_len {
                if residual[i] > 1 {
                    // one prime above sqrt(hi) remains, with exponent 1
                    seg[i] *= self.prime_value(residual[i]);
                }
            }
            if seg_lo == 1 {
                seg[0] = ONE; // f(1) = 1
            }
            seg_lo = seg_hi + 1;
        }
        Ok(out)
    }
}
