//! The pretentious distance and its infima over archimedean and character
//! twists.
//!
//! For 1-bounded multiplicative `f, g` the distance is
//!
//! ```text
//! D(f, g; X)^2 = sum_{p <= X} (1 - Re(f(p) conj(g(p)))) / p ,
//! ```
//!
//! a pseudo-metric on 1-bounded multiplicative functions. From it:
//!
//! * `M(f; X) = inf_{|t| <= X} D(f, n^{it}; X)^2`,
//! * `M(f; X, Q) = inf_{q <= Q, chi mod q} M(f conj(chi); X)`.
//!
//! The infima are approximated from above by a grid scan plus local
//! golden-section refinement. The scan uses a geometric ladder in `|t|` with
//! relative spacing `eps / log X` (the summand `p^{it}` oscillates on the
//! `1/log p` scale, so pretenders at height up to roughly `1/eps` are
//! resolved by the ladder; beyond that the result is still a valid upper
//! bound, and the grid metadata records the resolution). Reported `M` values
//! are therefore upper bounds on the true infimum, never claims of it.

use crate::dirichlet::character::{CharacterGroup, DirichletCharacter};
use crate::dirichlet::multfn::MultFn;
use crate::error::{Error, Result};
use crate::sieve;
use crate::typical::IntervalSystem;
use crate::util::{golden_section_min, Kahan, KahanComplex};
use num_complex::Complex64;
use rayon::prelude::*;

/// A computed distance value together with its cutoff and term count.
#[derive(Clone, Copy, Debug)]
pub struct DistanceResult {
    pub value: f64,
    pub x: u64,
    pub term_count: usize,
}

/// Prime data reused across distance evaluations at a fixed cutoff.
pub struct DistanceEngine {
    x: u64,
    primes: Vec<u64>,
    ln_p: Vec<f64>,
    inv_p: Vec<f64>,
    sum_inv_p: f64,
}

impl DistanceEngine {
    pub fn new(x: u64) -> Result<DistanceEngine> {
        if x < 2 {
            return Err(Error::precondition(format!("distance cutoff X = {x} must be >= 2")));
        }
        let primes = sieve::primes_in(2, x)?;
        let ln_p: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let inv_p: Vec<f64> = primes.iter().map(|&p| 1.0 / p as f64).collect();
        let mut s = Kahan::new();
        for &v in &inv_p {
            s.add(v);
        }
        Ok(DistanceEngine { x, primes, ln_p, inv_p, sum_inv_p: s.value() })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `sum_{p <= X} 1/p`.
    pub fn sum_inv_p(&self) -> f64 {
        self.sum_inv_p
    }

    /// `f` evaluated at every prime up to the cutoff.
    pub fn prime_values(&self, f: &MultFn) -> Vec<Complex64> {
        self.primes.iter().map(|&p| f.prime_value(p)).collect()
    }

    /// `D(f, g; X)^2` from precomputed prime-value arrays.
    pub fn distance_sq_arrays(&self, fv: &[Complex64], gv: &[Complex64]) -> f64 {
        let mut acc = Kahan::new();
        for i in 0..self.primes.len() {
            let term = 1.0 - (fv[i] * gv[i].conj()).re;
            acc.add(term * self.inv_p[i]);
        }
        acc.value()
    }

    pub fn distance(&self, f: &MultFn, g: &MultFn) -> DistanceResult {
        let fv = self.prime_values(f);
        let gv = self.prime_values(g);
        let sq = self.distance_sq_arrays(&fv, &gv).max(0.0);
        DistanceResult { value: sq.sqrt(), x: self.x, term_count: self.primes.len() }
    }

    /// `D(f, n -> chi(n) n^{it}; X)`; `chi = None` means no character twist.
    pub fn distance_twisted(
        &self,
        f: &MultFn,
        chi: Option<&DirichletCharacter>,
        t: f64,
    ) -> Result<DistanceResult> {
        if t.abs() > self.x as f64 {
            return Err(Error::precondition(format!(
                "|t| = {} exceeds the cutoff X = {}",
                t.abs(),
                self.x
            )));
        }
        let w = self.twisted_weights(f, chi);
        let sq = self.twisted_sq_at(&w, t).max(0.0);
        Ok(DistanceResult { value: sq.sqrt(), x: self.x, term_count: self.primes.len() })
    }

    /// Per-prime weights `f(p) conj(chi(p))` for the twisted distance.
    fn twisted_weights(&self, f: &MultFn, chi: Option<&DirichletCharacter>) -> Vec<Complex64> {
        match chi {
            None => self.prime_values(f),
            Some(chi) => self
                .primes
                .iter()
                .map(|&p| f.prime_value(p) * chi.eval(p).conj())
                .collect(),
        }
    }

    /// `D^2` with `g(p) = p^{it}` against the weights `w`:
    /// `sum (1 - Re(w_p e^{-i t ln p}))/p`.
    fn twisted_sq_at(&self, w: &[Complex64], t: f64) -> f64 {
        let mut acc = Kahan::new();
        for i in 0..self.primes.len() {
            let (s, c) = (t * self.ln_p[i]).sin_cos();
            let re = w[i].re * c + w[i].im * s;
            acc.add((1.0 - re) * self.inv_p[i]);
        }
        acc.value()
    }

    /// Real-weight specialization (skips the sine term).
    fn twisted_sq_at_real(&self, w: &[f64], t: f64) -> f64 {
        let mut acc = Kahan::new();
        for i in 0..self.primes.len() {
            let c = (t * self.ln_p[i]).cos();
            acc.add((1.0 - w[i] * c) * self.inv_p[i]);
        }
        acc.value()
    }
}

/// Grid controls for the `M` infima.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Relative ladder spacing is `eps / log X`; smaller is denser.
    pub eps: f64,
    /// Golden-section bracket width at which refinement stops.
    pub refine_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { eps: 0.1, refine_tol: 1e-6 }
    }
}

/// What the scan actually did, reported alongside every `M` value.
#[derive(Clone, Copy, Debug)]
pub struct GridMeta {
    pub points: usize,
    pub eps: f64,
    pub refine_tol: f64,
    /// Pretenders with `|t|` up to about this height are resolved by the ladder.
    pub dense_radius: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct BigMResult {
    /// Upper bound on `M(f; X)`.
    pub m: f64,
    pub argmin_t: f64,
    pub grid: GridMeta,
}

#[derive(Clone, Debug)]
pub struct BigMQResult {
    /// Upper bound on `M(f; X, Q)`.
    pub m: f64,
    pub q: u64,
    pub chi_index: usize,
    pub argmin_t: f64,
    pub grid: GridMeta,
    /// Per-character minima as `(q, chi index, m, t)`.
    pub per_character: Vec<(u64, usize, f64, f64)>,
}

/// The scan ladder: `0` and `+-(eps/log X) * rho^k` up to `X`, ascending.
fn grid_points(x: u64, eps: f64, symmetric: bool) -> Vec<f64> {
    let xf = x as f64;
    let lx = xf.ln().max(1.0);
    let t0 = eps / lx;
    let rho = 1.0 + eps / lx;
    let mut pos = Vec::new();
    let mut t = t0;
    while t <= xf {
        pos.push(t);
        t *= rho;
    }
    let mut ts = Vec::with_capacity(2 * pos.len() + 1);
    if symmetric {
        ts.extend(pos.iter().rev().map(|v| -v));
    }
    ts.push(0.0);
    ts.extend(pos.iter().copied());
    ts
}

fn refine_around(
    ts: &[f64],
    best_idx: usize,
    best_val: f64,
    tol: f64,
    mut d2: impl FnMut(f64) -> f64,
) -> (f64, f64) {
    let lo = if best_idx > 0 { ts[best_idx - 1] } else { ts[best_idx] };
    let hi = if best_idx + 1 < ts.len() { ts[best_idx + 1] } else { ts[best_idx] };
    if hi <= lo {
        return (ts[best_idx], best_val);
    }
    let (t_ref, v_ref) = golden_section_min(lo, hi, tol, &mut d2);
    if v_ref < best_val {
        (t_ref, v_ref)
    } else {
        (ts[best_idx], best_val)
    }
}

/// Upper bound on `M(f; X) = inf_{|t| <= X} D(f, n^{it}; X)^2`.
pub fn big_m(f: &MultFn, x: u64, spec: GridSpec) -> Result<BigMResult> {
    let engine = DistanceEngine::new(x)?;
    big_m_with(&engine, f, spec)
}

pub fn big_m_with(engine: &DistanceEngine, f: &MultFn, spec: GridSpec) -> Result<BigMResult> {
    if engine.x() < 100 {
        return Err(Error::precondition(format!(
            "M(f; X) needs X >= 100, got {}",
            engine.x()
        )));
    }
    let real = f.is_real_valued();
    let ts = grid_points(engine.x(), spec.eps, !real);
    let grid = GridMeta {
        points: ts.len(),
        eps: spec.eps,
        refine_tol: spec.refine_tol,
        dense_radius: 1.0 / spec.eps,
    };
    // the scan is embarrassingly parallel; the merge is a sequential min over
    // indices so results do not depend on thread count
    let (best_idx, best_val) = if real {
        let w: Vec<f64> = engine.prime_values(f).iter().map(|v| v.re).collect();
        let vals: Vec<f64> = ts.par_iter().map(|&t| engine.twisted_sq_at_real(&w, t)).collect();
        argmin(&vals)
    } else {
        let w = engine.prime_values(f);
        let vals: Vec<f64> = ts.par_iter().map(|&t| engine.twisted_sq_at(&w, t)).collect();
        argmin(&vals)
    };
    let w = engine.prime_values(f);
    let (t_star, m) = refine_around(&ts, best_idx, best_val, spec.refine_tol, |t| {
        engine.twisted_sq_at(&w, t)
    });
    Ok(BigMResult { m, argmin_t: t_star, grid })
}

fn argmin(vals: &[f64]) -> (usize, f64) {
    let mut idx = 0;
    let mut best = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        if v < best {
            best = v;
            idx = i;
        }
    }
    (idx, best)
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / crate::util::gcd(a, b) * b
}

/// Upper bound on `M(f; X, Q) = inf_{q <= Q, chi mod q} M(f conj(chi); X)`.
///
/// Shares one grid scan across all characters by bucketing primes modulo
/// `lcm(1..=Q)` when that lcm is small, since
/// `sum_p f(p) conj(chi(p)) p^{-it}/p` depends on `chi` only through the
/// residue class of `p`.
pub fn big_m_q(f: &MultFn, x: u64, qmax: u64, spec: GridSpec) -> Result<BigMQResult> {
    if qmax < 1 {
        return Err(Error::precondition("Q must be >= 1".to_string()));
    }
    if qmax > 1_000 {
        return Err(Error::capacity(format!(
            "Q = {qmax}: the character count beyond 10^3 is impractical"
        )));
    }
    let engine = DistanceEngine::new(x)?;
    if engine.x() < 100 {
        return Err(Error::precondition(format!("M(f; X, Q) needs X >= 100, got {x}")));
    }
    let groups: Vec<CharacterGroup> =
        (1..=qmax).map(CharacterGroup::new).collect::<Result<_>>()?;
    let shared_lcm = (1..=qmax).fold(1u64, lcm_u64);

    if shared_lcm <= 30_000 {
        big_m_q_bucketed(&engine, f, &groups, shared_lcm, spec)
    } else {
        big_m_q_per_character(&engine, f, &groups, spec)
    }
}

fn big_m_q_bucketed(
    engine: &DistanceEngine,
    f: &MultFn,
    groups: &[CharacterGroup],
    l: u64,
    spec: GridSpec,
) -> Result<BigMQResult> {
    let ts = grid_points(engine.x(), spec.eps, true);
    let grid = GridMeta {
        points: ts.len(),
        eps: spec.eps,
        refine_tol: spec.refine_tol,
        dense_radius: 1.0 / spec.eps,
    };
    let w = engine.prime_values(f);
    let bucket_of: Vec<u32> = engine.primes().iter().map(|&p| (p % l) as u32).collect();

    // character value tables over residues mod q
    struct CharEntry {
        q: u64,
        index: usize,
        chi: DirichletCharacter,
        conj_vals: Vec<Complex64>, // conj(chi(r)) for r in 0..q
    }
    let mut chars: Vec<CharEntry> = Vec::new();
    for g in groups {
        for chi in g.characters() {
            let q = g.q();
            let conj_vals = (0..q).map(|r| chi.eval(r).conj()).collect();
            chars.push(CharEntry { q, index: chi.index(), chi, conj_vals });
        }
    }

    let lu = l as usize;
    let nchars = chars.len();
    let base = engine.sum_inv_p();

    // per-chunk partial minima, merged sequentially for determinism
    let chunk = 64;
    let partials: Vec<Vec<(f64, usize)>> = ts
        .par_chunks(chunk)
        .enumerate()
        .map(|(ci, block)| {
            let mut buckets = vec![Complex64::new(0.0, 0.0); lu];
            let mut mins = vec![(f64::INFINITY, 0usize); nchars];
            for (bi, &t) in block.iter().enumerate() {
                let t_idx = ci * chunk + bi;
                for b in buckets.iter_mut() {
                    *b = Complex64::new(0.0, 0.0);
                }
                for i in 0..w.len() {
                    let (s, c) = (t * engine.ln_p[i]).sin_cos();
                    let phase = Complex64::new(c, -s);
                    buckets[bucket_of[i] as usize] += w[i] * phase * engine.inv_p[i];
                }
                for (k, ch) in chars.iter().enumerate() {
                    let q = ch.q;
                    let mut dot = Complex64::new(0.0, 0.0);
                    for (rr, b) in buckets.iter().enumerate() {
                        let cv = ch.conj_vals[rr % q as usize];
                        if cv.re != 0.0 || cv.im != 0.0 {
                            dot += cv * b;
                        }
                    }
                    let val = base - dot.re;
                    if val < mins[k].0 {
                        mins[k] = (val, t_idx);
                    }
                }
            }
            mins
        })
        .collect();

    let mut mins = vec![(f64::INFINITY, 0usize); nchars];
    for part in partials {
        for (k, &(v, idx)) in part.iter().enumerate() {
            if v < mins[k].0 || (v == mins[k].0 && idx < mins[k].1) {
                mins[k] = (v, idx);
            }
        }
    }

    let mut per_character = Vec::with_capacity(nchars);
    let mut best = (f64::INFINITY, 0u64, 0usize, 0.0f64);
    for (k, ch) in chars.iter().enumerate() {
        let (val, idx) = mins[k];
        let tw = engine.twisted_weights(f, Some(&ch.chi));
        let (t_star, m) =
            refine_around(&ts, idx, val, spec.refine_tol, |t| engine.twisted_sq_at(&tw, t));
        per_character.push((ch.q, ch.index, m, t_star));
        if m < best.0 {
            best = (m, ch.q, ch.index, t_star);
        }
    }
    Ok(BigMQResult {
        m: best.0,
        q: best.1,
        chi_index: best.2,
        argmin_t: best.3,
        grid,
        per_character,
    })
}

fn big_m_q_per_character(
    engine: &DistanceEngine,
    f: &MultFn,
    groups: &[CharacterGroup],
    spec: GridSpec,
) -> Result<BigMQResult> {
    let mut per_character = Vec::new();
    let mut best: Option<(f64, u64, usize, f64)> = None;
    let mut grid = None;
    for g in groups {
        for chi in g.characters() {
            let tw = MultFn::twisted_by_conj(f, &chi);
            let r = big_m_with(engine, &tw, spec)?;
            grid.get_or_insert(r.grid);
            per_character.push((g.q(), chi.index(), r.m, r.argmin_t));
            if best.map_or(true, |(m, ..)| r.m < m) {
                best = Some((r.m, g.q(), chi.index(), r.argmin_t));
            }
        }
    }
    let (m, q, chi_index, argmin_t) = best.expect("at least the principal character");
    Ok(BigMQResult { m, q, chi_index, argmin_t, grid: grid.unwrap(), per_character })
}

/// Triangle-inequality slack `D(f,g) + D(g,h) - D(f,h)` at cutoff `x`.
pub fn triangle_check(f: &MultFn, g: &MultFn, h: &MultFn, x: u64) -> Result<f64> {
    let engine = DistanceEngine::new(x)?;
    Ok(triangle_check_with(&engine, f, g, h))
}

pub fn triangle_check_with(engine: &DistanceEngine, f: &MultFn, g: &MultFn, h: &MultFn) -> f64 {
    let fv = engine.prime_values(f);
    let gv = engine.prime_values(g);
    let hv = engine.prime_values(h);
    let dfg = engine.distance_sq_arrays(&fv, &gv).max(0.0).sqrt();
    let dgh = engine.distance_sq_arrays(&gv, &hv).max(0.0).sqrt();
    let dfh = engine.distance_sq_arrays(&fv, &hv).max(0.0).sqrt();
    dfg + dgh - dfh
}

/// Both sides of the Granville-Soundararajan chain inequalities for a real
/// `f` against the twist `chi(n) n^{i alpha}`, with the absolute-constant
/// terms reported as residuals rather than asserted.
#[derive(Clone, Copy, Debug)]
pub struct GsChainReport {
    pub x: u64,
    pub alpha: f64,
    /// `D(f, chi n^{i alpha}; x)`.
    pub lhs: f64,
    /// `(1/4) sqrt(log log x)`: the main term of the unconditional lower bound.
    pub first_main: f64,
    /// `lhs - first_main` (the empirical `O_chi(1)`).
    pub first_residual: f64,
    /// Whether the unconditional bound's hypotheses hold (`1 <= |alpha| <= x`,
    /// or any `alpha` when `chi^2` is non-principal).
    pub first_applies: bool,
    /// `(1/3) D(f, chi; x)`: the main term of the quadratic-character bound.
    pub sec_main: f64,
    /// `lhs - sec_main` (the empirical `O(1)`).
    pub sec_residual: f64,
    /// Whether the quadratic-character bound applies (`chi` quadratic, `|alpha| <= 1`).
    pub sec_applies: bool,
    /// The chain's pivot `D(conj(chi) n^{-i alpha}, chi n^{i alpha}; x) / 2`.
    pub half_chain: f64,
}

pub fn gs_chain_report(
    f: &MultFn,
    chi: &DirichletCharacter,
    alpha: f64,
    x: u64,
) -> Result<GsChainReport> {
    if !f.is_real_valued() {
        return Err(Error::precondition(format!(
            "the chain inequalities need a real-valued f, got {}",
            f.name()
        )));
    }
    if alpha.abs() > x as f64 {
        return Err(Error::precondition(format!("|alpha| = {} exceeds x = {x}", alpha.abs())));
    }
    let engine = DistanceEngine::new(x)?;
    let lhs = engine.distance_twisted(f, Some(chi), alpha)?.value;
    let first_main = 0.25 * (x as f64).ln().ln().sqrt();
    let chi_fn = MultFn::character(chi);
    let sec_main = engine.distance(f, &chi_fn).value / 3.0;

    // pivot: D(conj(chi) n^{-ia}, chi n^{ia})^2 = sum (1 - Re(conj(chi^2)(p) p^{-2ia}))/p
    let mut acc = Kahan::new();
    for (i, &p) in engine.primes().iter().enumerate() {
        let c2 = chi.eval(p);
        let c2 = (c2 * c2).conj();
        let (s, c) = (2.0 * alpha * engine.ln_p[i]).sin_cos();
        let re = c2.re * c + c2.im * s;
        acc.add((1.0 - re) * engine.inv_p[i]);
    }
    let half_chain = 0.5 * acc.value().max(0.0).sqrt();

    Ok(GsChainReport {
        x,
        alpha,
        lhs,
        first_main,
        first_residual: lhs - first_main,
        first_applies: !chi.is_real() || alpha.abs() >= 1.0,
        sec_main,
        sec_residual: lhs - sec_main,
        sec_applies: chi.is_quadratic() && alpha.abs() <= 1.0,
        half_chain,
    })
}

/// Partial sum `sum_{X <= n <= 2X, n in S} f(n) n^{-1-it}`, with `S`
/// membership from `sys` (no restriction when `sys` is `None`).
pub fn dirichlet_series_partial(
    f: &MultFn,
    sys: Option<&IntervalSystem>,
    x: u64,
    t: f64,
) -> Result<Complex64> {
    if x < 1 {
        return Err(Error::domain("X must be positive".to_string()));
    }
    if 2 * x > sieve::MAX_N {
        return Err(Error::capacity(format!("2X = {} exceeds cap {}", 2 * x, sieve::MAX_N)));
    }
    let mut acc = KahanComplex::new();
    let mut lo = x;
    while lo <= 2 * x {
        let hi = (lo + sieve::DEFAULT_SEGMENT as u64 - 1).min(2 * x);
        let vals = f.eval_range(lo, hi)?;
        let mask = match sys {
            Some(s) => Some((s.membership_mask(lo, hi)?, s.full_mask())),
            None => None,
        };
        for n in lo..=hi {
            let i = (n - lo) as usize;
            if let Some((m, full)) = &mask {
                if m[i] != *full {
                    continue;
                }
            }
            let v = vals[i];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let nf = n as f64;
            let (s, c) = (t * nf.ln()).sin_cos();
            acc.add(v * Complex64::new(c, -s) / nf);
        }
        lo = hi + 1;
    }
    Ok(acc.value())
}
