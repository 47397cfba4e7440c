//! Short exponential sums and their exact sliding-window integrals.
//!
//! `S(x) = sum_{x <= n <= x+H} f(n) e(alpha n)` is piecewise constant in
//! `x`: its value changes only where an integer enters the window (at
//! `x = n - H`) or leaves it (just past `x = n`). The sweep walks those
//! breakpoints in order, maintaining the running sum incrementally, so
//! `int |S| dx` and friends are computed exactly (up to floating-point
//! accumulation) instead of by quadrature.

use crate::error::{Error, Result};
use crate::util::{e, Kahan};
use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::{AddAssign, SubAssign};

/// `sum_{x <= n <= x+H} vals(n) e(alpha n)` over the integers of the window.
pub fn short_sum(vals: impl Fn(i64) -> Complex64, x: f64, h: f64, alpha: f64) -> Complex64 {
    if h < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let n_lo = x.ceil() as i64;
    let n_hi = (x + h).floor() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in n_lo..=n_hi {
        let v = vals(n);
        if v.re != 0.0 || v.im != 0.0 {
            acc += v * e(alpha * n as f64);
        }
    }
    acc
}

/// Walk the sliding-window sum of `weights` (indexed from `n_lo`) over
/// `x in [x_lo, x_hi]`, calling `visit(segment_length, window_sum)` for each
/// maximal segment on which the sum is constant.
///
/// Window convention: integer `n` belongs to the window at `x` iff
/// `x <= n <= x + h`, so `n` is present for `x in [n - h, n]`.
pub fn sweep_segments<V>(
    weights: &[V],
    n_lo: i64,
    h: f64,
    x_lo: f64,
    x_hi: f64,
    mut visit: impl FnMut(f64, V),
) where
    V: Copy + Default + AddAssign + SubAssign,
{
    if x_hi <= x_lo || weights.is_empty() {
        return;
    }
    let count = weights.len();
    // entry events at n - h and exit events at n are each sorted by n:
    // merge the two streams instead of sorting
    let mut running = V::default();
    // advance to the initial window: n in [x_lo, x_lo + h]
    let mut add_idx = 0usize; // next n to enter (entry position n - h)
    let mut rem_idx = 0usize; // next n to leave (exit position n)
    while add_idx < count && (n_lo + add_idx as i64) as f64 - h <= x_lo {
        running += weights[add_idx];
        add_idx += 1;
    }
    while rem_idx < count && ((n_lo + rem_idx as i64) as f64) < x_lo {
        running -= weights[rem_idx];
        rem_idx += 1;
    }
    let mut x = x_lo;
    loop {
        let next_add = if add_idx < count {
            (n_lo + add_idx as i64) as f64 - h
        } else {
            f64::INFINITY
        };
        let next_rem = if rem_idx < count {
            (n_lo + rem_idx as i64) as f64
        } else {
            f64::INFINITY
        };
        let pos = next_add.min(next_rem);
        if pos >= x_hi {
            visit(x_hi - x, running);
            return;
        }
        if pos > x {
            visit(pos - x, running);
            x = pos;
        }
        if next_add == pos {
            running += weights[add_idx];
            add_idx += 1;
        }
        if next_rem == pos {
            running -= weights[rem_idx];
            rem_idx += 1;
        }
    }
}

/// Exact `int_{x_lo}^{x_hi} |sum_{x <= n <= x+h} w_n e(alpha n)| dx` for
/// weights `w_n` indexed from `n_lo`.
pub fn sweep_integral_weights(
    weights: &[Complex64],
    n_lo: i64,
    h: f64,
    alpha: f64,
    x_lo: f64,
    x_hi: f64,
) -> f64 {
    let phased: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| w * e(alpha * (n_lo + i as i64) as f64))
        .collect();
    let mut acc = Kahan::new();
    sweep_segments(&phased, n_lo, h, x_lo, x_hi, |len, s: Complex64| {
        acc.add(s.norm() * len);
    });
    acc.value()
}

/// Exact `int_0^X |sum_{x <= n <= x+H} f(n) e(alpha n)| dx`, with `f` given
/// by its values on `[1, X + H]`.
pub fn sweep_integral(values: &[Complex64], x: u64, h: f64, alpha: f64) -> Result<f64> {
    let needed = (x as f64 + h).floor() as usize;
    if values.len() < needed {
        return Err(Error::precondition(format!(
            "need f on [1, {needed}], got {} values",
            values.len()
        )));
    }
    Ok(sweep_integral_weights(values, 1, h, alpha, 0.0, x as f64))
}

/// A grid scan of `alpha -> int_0^X |S(x; alpha)| dx`.
#[derive(Clone, Debug)]
pub struct SupScan {
    pub alpha_star: f64,
    pub value: f64,
    pub grid_size: usize,
    /// Value at `alpha = 0` for comparison runs.
    pub value_at_zero: f64,
}

/// Maximize the sweep integral over the uniform grid `alpha = j / grid_size`.
///
/// The result is a lower bound on the true supremum; callers compare scans
/// at two grid sizes to gauge resolution.
pub fn sup_over_alpha(values: &[Complex64], x: u64, h: f64, grid_size: usize) -> Result<SupScan> {
    if grid_size < 2 {
        return Err(Error::precondition("grid must have at least 2 points".to_string()));
    }
    let evals: Vec<f64> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let alpha = j as f64 / grid_size as f64;
            sweep_integral_weights(values, 1, h, alpha, 0.0, x as f64)
        })
        .collect();
    let mut best = 0usize;
    for (j, &v) in evals.iter().enumerate() {
        if v > evals[best] {
            best = j;
        }
    }
    Ok(SupScan {
        alpha_star: best as f64 / grid_size as f64,
        value: evals[best],
        grid_size,
        value_at_zero: evals[0],
    })
}
