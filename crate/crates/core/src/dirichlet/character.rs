//! Dirichlet character groups with exact root-of-unity arithmetic.
//!
//! `(Z/q)^*` is decomposed into cyclic components (a primitive root for each
//! odd prime power, the `{-1} x <5>` structure for powers of two). A
//! character is a tuple of integer exponents, one per component, and every
//! character value is represented exactly as `e(k / L)` with `L` the group
//! exponent lcm — so multiplicativity identities are pure integer
//! congruences, and complex values are materialized only at evaluation.

use crate::error::{Error, Result};
use crate::util::{e, gcd};
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Clone, Debug)]
struct Component {
    /// Prime-power modulus this cyclic factor lives in.
    modulus: u64,
    order: u64,
}

#[derive(Debug)]
struct GroupData {
    q: u64,
    components: Vec<Component>,
    /// lcm of the component orders (the group exponent).
    exponent: u64,
    /// Discrete logs per coprime residue, flattened with stride
    /// `components.len()`; `u32::MAX` in the first slot marks non-coprime.
    dlog: Vec<u32>,
    phi: u64,
}

const NON_UNIT: u32 = u32::MAX;

/// All `phi(q)` Dirichlet characters mod `q`.
#[derive(Clone)]
pub struct CharacterGroup {
    data: Arc<GroupData>,
}

/// One Dirichlet character: exponent digits over the group's cyclic components.
#[derive(Clone)]
pub struct DirichletCharacter {
    data: Arc<GroupData>,
    digits: Vec<u64>,
    order: u64,
    index: usize,
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn factorize_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primitive root mod an odd prime power `p^e`.
fn primitive_root_odd(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let factors = factorize_small(phi_p);
    let mut g = 2u64;
    loop {
        if g % p != 0 && factors.iter().all(|&(f, _)| pow_mod(g, phi_p / f, p) != 1) {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // lift: g stays primitive mod p^e unless g^(p-1) = 1 mod p^2
    let p2 = p * p;
    if pow_mod(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

impl CharacterGroup {
    /// Build the full character group mod `q` (`1 <= q <= 10^6`).
    pub fn new(q: u64) -> Result<CharacterGroup> {
        if q == 0 {
            return Err(Error::domain("modulus must be positive".to_string()));
        }
        if q > 1_000_000 {
            return Err(Error::capacity(format!("modulus {q} beyond the 10^6 table cap")));
        }
        // Per prime-power factor: its cyclic components plus a discrete-log
        // table over residues mod p^e (one u32 column per component).
        let mut components: Vec<Component> = Vec::new();
        let mut factor_tables: Vec<(u64, usize, Vec<u32>)> = Vec::new(); // (p^e, ncols, table)
        for (p, e) in factorize_small(q) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => {
                        components.push(Component { modulus: 4, order: 2 });
                        let mut table = vec![NON_UNIT; 4];
                        table[1] = 0;
                        table[3] = 1;
                        factor_tables.push((4, 1, table));
                    }
                    _ => {
                        // (Z/2^e)^* = {+-1} x <5>: joint walk over both digits
                        let half = pe / 4;
                        components.push(Component { modulus: pe, order: 2 });
                        components.push(Component { modulus: pe, order: half });
                        let mut table = vec![NON_UNIT; 2 * pe as usize];
                        for a in 0..2u64 {
                            let mut acc = if a == 0 { 1 } else { pe - 1 };
                            for b in 0..half {
                                let idx = 2 * acc as usize;
                                table[idx] = a as u32;
                                table[idx + 1] = b as u32;
                                acc = ((acc as u128 * 5) % pe as u128) as u64;
                            }
                        }
                        factor_tables.push((pe, 2, table));
                    }
                }
            } else {
                let g = primitive_root_odd(p, e);
                let order = pe / p * (p - 1);
                components.push(Component { modulus: pe, order });
                let mut table = vec![NON_UNIT; pe as usize];
                let mut acc = 1u64;
                for k in 0..order {
                    table[acc as usize] = k as u32;
                    acc = ((acc as u128 * g as u128) % pe as u128) as u64;
                }
                factor_tables.push((pe, 1, table));
            }
        }
        let ncomp = components.len();
        let mut phi = 1u64;
        let mut exponent = 1u64;
        for c in &components {
            phi *= c.order;
            exponent = lcm(exponent, c.order);
        }

        // flatten: one digit row per residue mod q
        let stride = ncomp.max(1);
        let mut dlog = vec![NON_UNIT; (q as usize) * stride];
        'res: for r in 0..q {
            if q > 1 && gcd(r, q) != 1 {
                continue;
            }
            let base = (r as usize) * stride;
            let mut col = 0usize;
            for &(pe, ncols, ref table) in &factor_tables {
                let rr = (r % pe) as usize;
                for c in 0..ncols {
                    let dl = table[rr * ncols + c];
                    if dl == NON_UNIT {
                        debug_assert!(false, "unit residue missing from factor table");
                        continue 'res;
                    }
                    dlog[base + col] = dl;
                    col += 1;
                }
            }
            if ncomp == 0 {
                // q = 1 or q = 2: single unit class, no digits
                dlog[base] = 0;
            }
        }
        Ok(CharacterGroup {
            data: Arc::new(GroupData { q, components, exponent, dlog, phi }),
        })
    }

    pub fn q(&self) -> u64 {
        self.data.q
    }

    /// `phi(q)`: the number of characters.
    pub fn len(&self) -> usize {
        self.data.phi as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Character by index; index 0 is the principal character.
    pub fn character(&self, index: usize) -> Result<DirichletCharacter> {
        if index >= self.len() {
            return Err(Error::domain(format!(
                "character index {index} out of range (phi({}) = {})",
                self.data.q,
                self.len()
            )));
        }
        let mut digits = Vec::with_capacity(self.data.components.len());
        let mut rem = index as u64;
        for c in &self.data.components {
            digits.push(rem % c.order);
            rem /= c.order;
        }
        let order = self
            .data
            .components
            .iter()
            .zip(&digits)
            .map(|(c, &d)| c.order / gcd(c.order, d))
            .fold(1, lcm);
        Ok(DirichletCharacter { data: Arc::clone(&self.data), digits, order, index })
    }

    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(|i| self.character(i).expect("index in range"))
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.data.q
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Real-valued (principal or quadratic).
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Quadratic: `chi^2` principal but `chi` not.
    pub fn is_quadratic(&self) -> bool {
        self.order == 2
    }

    /// Exact value exponent: `chi(n) = e(k / L)` for the returned `(k, L)`,
    /// or `None` when `gcd(n, q) > 1` (value 0).
    pub fn exponent_of(&self, n: u64) -> Option<(u64, u64)> {
        let q = self.data.q;
        if q == 1 {
            return Some((0, 1));
        }
        let r = (n % q) as usize;
        if gcd(r as u64, q) != 1 {
            return None;
        }
        let stride = self.data.components.len().max(1);
        let base = r * stride;
        if self.data.dlog[base] == NON_UNIT && !self.data.components.is_empty() {
            return None;
        }
        let l = self.data.exponent;
        let mut k = 0u64;
        for (ci, c) in self.data.components.iter().enumerate() {
            let dl = self.data.dlog[base + ci] as u64;
            let contrib = (self.digits[ci] as u128 * dl as u128) % c.order as u128;
            k = (k + (contrib as u64) * (l / c.order)) % l;
        }
        Some((k, l))
    }

    /// `chi(n)` as a complex number (0 off the units).
    pub fn eval(&self, n: u64) -> Complex64 {
        match self.exponent_of(n) {
            None => Complex64::new(0.0, 0.0),
            Some((k, l)) => e(k as f64 / l as f64),
        }
    }
}

/// Max over `m` coprime to `q` of the Fourier-inversion error
/// `|(1/phi(q)) sum_chi chi(b) conj(chi(m)) - 1_{m = b (q)}|`.
pub fn verify_orthogonality(q: u64, b: u64) -> Result<f64> {
    let group = CharacterGroup::new(q)?;
    if q > 1 && gcd(b % q, q) != 1 {
        return Err(Error::precondition(format!("b = {b} not coprime to q = {q}")));
    }
    let chars: Vec<_> = group.characters().collect();
    let phi = chars.len() as f64;
    let mut max_err = 0.0f64;
    for m in 0..q.max(1) {
        if q > 1 && gcd(m, q) != 1 {
            continue;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for chi in &chars {
            sum += chi.eval(b) * chi.eval(m).conj();
        }
        sum /= phi;
        let expect = if (b % q.max(1)) == m { 1.0 } else { 0.0 };
        let err = (sum - Complex64::new(expect, 0.0)).norm();
        max_err = max_err.max(err);
    }
    Ok(max_err)
}
