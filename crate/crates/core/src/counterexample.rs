//! Iterative construction of a 1-bounded multiplicative function whose
//! consecutive correlations stay macroscopically large even though its
//! distance to every fixed twisted character diverges.
//!
//! The construction runs in stages. Stage `m` finds an alignment frequency
//! `s_{m+1} > t_m` whose torus point `(p^{i s_{m+1}})_{p <= t_m}` lands within
//! `eps` of the already-chosen values `(g(p))_{p <= t_m}`; then `g(p) :=
//! p^{i s_{m+1}}` on the new block `t_m < p <= t_{m+1}`, `t_{m+1} := s_{m+1}^2`,
//! and the function is carried to the integers through the squarefree
//! indicator: `g(n) = mu(n)^2 prod_{p | n} g(p)`.
//!
//! Equidistribution guarantees an alignment exists once the search range is
//! long enough, but the guaranteed range grows like the reciprocal of an
//! `eps^(pi(t_m))` volume: each additional prime below `t_m` multiplies the
//! expected search length by roughly `2 pi / eps`. The searcher is honest
//! about this — it scans a grid of the configured range and reports failure
//! rather than pretending; feasible demonstrations keep `pi(t_1)` small
//! (three or four primes).

use crate::dirichlet::{DirichletCharacter, MultFn};
use crate::error::{Error, Result};
use crate::sieve;
use crate::util::{dist_to_nearest_int, Kahan, KahanComplex};
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// One completed stage of the construction.
#[derive(Clone, Copy, Debug)]
pub struct AlignmentStage {
    pub m: usize,
    /// Scale at the start of the stage.
    pub t: u64,
    /// Alignment frequency found for the primes up to `t`.
    pub s: f64,
    /// `max_{p <= t} |p^{is} - g(p)|` actually achieved.
    pub eps_achieved: f64,
    /// Next scale `min(s^2, cap)`.
    pub t_next: u64,
    /// Whether the cap truncated `s^2`.
    pub capped: bool,
}

/// Result of an alignment search.
#[derive(Clone, Copy, Debug)]
pub struct Alignment {
    pub s: f64,
    pub eps_achieved: f64,
}

/// Smallest `s` in `[s_lo, s_hi]` (on a grid of step `eps / (2 ln p_max)`,
/// locally refined) with `|p^{is} - target_p| <= eps` for every target.
pub fn find_alignment(
    targets: &[(u64, Complex64)],
    s_lo: f64,
    s_hi: f64,
    eps: f64,
) -> Result<Alignment> {
    if targets.is_empty() {
        return Ok(Alignment { s: s_lo, eps_achieved: 0.0 });
    }
    if !(s_hi > s_lo) {
        return Err(Error::precondition(format!("bad search range [{s_lo}, {s_hi}]")));
    }
    for &(p, v) in targets {
        if (v.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::precondition(format!("target at p = {p} is not unimodular")));
        }
    }
    // |e^{ia} - e^{ib}| = 2|sin((a-b)/2)|: compare fractional phase distances
    let ln_p: Vec<f64> = targets.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let theta: Vec<f64> = targets
        .iter()
        .map(|&(_, v)| v.im.atan2(v.re) / std::f64::consts::TAU)
        .collect();
    let tol_frac = (eps / 2.0).asin() / std::f64::consts::PI;
    let max_ln = ln_p.iter().cloned().fold(f64::MIN, f64::max);
    let step = eps / (2.0 * max_ln);
    let total_points = ((s_hi - s_lo) / step).ceil() as u64;

    let hits_at = |s: f64| -> bool {
        for i in 0..ln_p.len() {
            let frac = s * ln_p[i] / std::f64::consts::TAU - theta[i];
            if dist_to_nearest_int(frac) > tol_frac {
                return false;
            }
        }
        true
    };
    let err_at = |s: f64| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..ln_p.len() {
            let frac = s * ln_p[i] / std::f64::consts::TAU - theta[i];
            let err = 2.0 * (std::f64::consts::PI * dist_to_nearest_int(frac)).sin();
            worst = worst.max(err);
        }
        worst
    };

    // batched parallel scan, earliest hit wins
    const BLOCK: u64 = 1 << 20;
    let mut block_lo = 0u64;
    let mut found: Option<u64> = None;
    while block_lo < total_points && found.is_none() {
        let batch: Vec<u64> = (0..8)
            .map(|b| block_lo + b * BLOCK)
            .filter(|&lo| lo < total_points)
            .collect();
        let firsts: Vec<Option<u64>> = batch
            .par_iter()
            .map(|&lo| {
                let hi = (lo + BLOCK).min(total_points);
                (lo..hi).find(|&k| hits_at(s_lo + k as f64 * step))
            })
            .collect();
        found = firsts.into_iter().flatten().next();
        block_lo += 8 * BLOCK;
    }
    let k = match found {
        Some(k) => k,
        None => {
            return Err(Error::AlignmentFailure { stage: 0, s_lo, s_hi, eps });
        }
    };
    // local refinement around the hit
    let s0 = s_lo + k as f64 * step;
    let mut best = (s0, err_at(s0));
    let fine = step / 200.0;
    for j in -200i64..=200 {
        let s = s0 + j as f64 * fine;
        if s < s_lo || s > s_hi {
            continue;
        }
        let e = err_at(s);
        if e < best.1 {
            best = (s, e);
        }
    }
    Ok(Alignment { s: best.0, eps_achieved: best.1 })
}

/// Search controls for [`build_counterexample`].
#[derive(Clone, Copy, Debug)]
pub struct BuildConfig {
    /// Upper end of each stage's `s` search range.
    pub s_cap: f64,
    /// Cap on the scales `t_{m+1} = min(s^2, t_cap)`.
    pub t_cap: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { s_cap: 1e7, t_cap: 1_000_000_000 }
    }
}

/// The constructed function plus its stage log.
pub struct Counterexample {
    pub t1: u64,
    pub eps: f64,
    pub stages: Vec<AlignmentStage>,
    /// Prime-value rule: blocks `(threshold, s)` with `g(p) = p^{is}` for
    /// `p` in `(previous threshold, threshold]`; `g(p) = 1` for `p <= t1`.
    pub blocks: Vec<(u64, f64)>,
}

impl Counterexample {
    /// `g(p)` under the staged rule (`1` beyond the last constructed block).
    pub fn prime_value(&self, p: u64) -> Complex64 {
        if p <= self.t1 {
            return Complex64::new(1.0, 0.0);
        }
        for &(threshold, s) in &self.blocks {
            if p <= threshold {
                return crate::util::unit_power(p, s);
            }
        }
        Complex64::new(1.0, 0.0)
    }

    /// The function `g(n) = mu(n)^2 prod_{p|n} g(p)` as a [`MultFn`].
    pub fn as_mult_fn(&self) -> MultFn {
        let t1 = self.t1;
        let blocks: Arc<Vec<(u64, f64)>> = Arc::new(self.blocks.clone());
        let blocks2 = Arc::clone(&blocks);
        let prime = move |p: u64| -> Complex64 {
            if p <= t1 {
                return Complex64::new(1.0, 0.0);
            }
            for &(threshold, s) in blocks.iter() {
                if p <= threshold {
                    return crate::util::unit_power(p, s);
                }
            }
            Complex64::new(1.0, 0.0)
        };
        let prime2 = prime.clone();
        MultFn::from_closures(
            "staged-alignment",
            false,
            false,
            Arc::new(move |p| prime(p)),
            Some(Arc::new(move |p, e| {
                let _ = &blocks2;
                if e == 1 {
                    prime2(p)
                } else {
                    Complex64::new(0.0, 0.0) // mu^2 kills higher powers
                }
            })),
        )
    }

    /// Final scale `t_{m+1}` of the construction.
    pub fn final_scale(&self) -> u64 {
        self.stages.last().map_or(self.t1, |s| s.t_next)
    }
}

/// Run the staged construction. `stages = 0` degenerates to `g = mu^2`.
pub fn build_counterexample(
    t1: u64,
    stages: usize,
    eps: f64,
    config: BuildConfig,
) -> Result<Counterexample> {
    if t1 < 10 {
        return Err(Error::precondition(format!("t1 = {t1} must be >= 10")));
    }
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::precondition(format!("eps = {eps} outside (0, 0.1]")));
    }
    let mut out = Counterexample { t1, eps, stages: Vec::new(), blocks: Vec::new() };
    let mut t_m = t1;
    for m in 1..=stages {
        let primes = sieve::primes_in(2, t_m)?;
        let targets: Vec<(u64, Complex64)> =
            primes.iter().map(|&p| (p, out.prime_value(p))).collect();
        let alignment = find_alignment(&targets, t_m as f64, config.s_cap, eps).map_err(|e| {
            match e {
                Error::AlignmentFailure { s_lo, s_hi, eps, .. } => {
                    Error::AlignmentFailure { stage: m, s_lo, s_hi, eps }
                }
                other => other,
            }
        })?;
        let s = alignment.s;
        let t_sq = s * s;
        let (t_next, capped) = if t_sq >= config.t_cap as f64 {
            (config.t_cap, true)
        } else {
            (t_sq as u64, false)
        };
        out.stages.push(AlignmentStage {
            m,
            t: t_m,
            s,
            eps_achieved: alignment.eps_achieved,
            t_next,
            capped,
        });
        out.blocks.push((t_next, s));
        if t_next <= t_m {
            break; // cap exhausted, further stages cannot grow the scale
        }
        t_m = t_next;
    }
    Ok(out)
}

/// `|sum_{n <= N} g(n) conj(g(n+1))| / N`.
pub fn consecutive_correlation(g: &MultFn, n_max: u64) -> Result<f64> {
    if n_max < 1 {
        return Err(Error::precondition("N must be positive".to_string()));
    }
    let mut acc = KahanComplex::new();
    let mut lo = 1u64;
    let mut prev_tail: Option<Complex64> = None;
    while lo <= n_max {
        let hi = (lo + sieve::DEFAULT_SEGMENT as u64 - 1).min(n_max);
        let vals = g.eval_range(lo, hi + 1)?;
        if let Some(first_prev) = prev_tail {
            acc.add(first_prev * vals[0].conj());
        }
        for i in 0..(hi - lo) as usize {
            acc.add(vals[i] * vals[i + 1].conj());
        }
        prev_tail = Some(vals[(hi - lo) as usize]);
        lo = hi + 1;
    }
    Ok(acc.value().norm() / n_max as f64)
}

/// One row of the divergence table: the partial sums
/// `sum_{p <= X} (1 - Re(g(p) conj(chi(p)) p^{-it})) / p` for each cutoff.
#[derive(Clone, Debug)]
pub struct DivergenceRow {
    pub q: u64,
    pub chi_index: usize,
    pub t: f64,
    pub partials: Vec<f64>,
}

/// Tabulate the twisted-distance partial sums of `g` over a `(chi, t)` grid.
pub fn divergence_profile(
    g: &MultFn,
    x_list: &[u64],
    t_grid: &[f64],
    chars: &[DirichletCharacter],
) -> Result<Vec<DivergenceRow>> {
    if x_list.is_empty() || x_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("cutoffs must be strictly increasing".to_string()));
    }
    let x_max = *x_list.last().unwrap();
    let primes = sieve::primes_in(2, x_max)?;
    let g_vals: Vec<Complex64> = primes.iter().map(|&p| g.prime_value(p)).collect();
    let mut rows = Vec::new();
    for chi in chars {
        let chi_vals: Vec<Complex64> = primes.iter().map(|&p| chi.eval(p).conj()).collect();
        for &t in t_grid {
            let mut partials = Vec::with_capacity(x_list.len());
            let mut acc = Kahan::new();
            let mut xi = 0usize;
            for (i, &p) in primes.iter().enumerate() {
                while xi < x_list.len() && p > x_list[xi] {
                    partials.push(acc.value());
                    xi += 1;
                }
                if xi >= x_list.len() {
                    break;
                }
                let (s, c) = (t * (p as f64).ln()).sin_cos();
                let w = g_vals[i] * chi_vals[i];
                let re = w.re * c + w.im * s;
                acc.add((1.0 - re) / p as f64);
            }
            while partials.len() < x_list.len() {
                partials.push(acc.value());
            }
            rows.push(DivergenceRow { q: chi.modulus(), chi_index: chi.index(), t, partials });
        }
    }
    Ok(rows)
}
