//! Correlation sums over affine forms and their averages over shifts.

use crate::dirichlet::MultFn;
use crate::error::{Error, Result};
use crate::sieve;
use crate::util::{seeded_rng, KahanComplex};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// An affine argument `a n + b + h` (`a >= 1`).
#[derive(Clone, Copy, Debug)]
pub struct AffineForm {
    pub a: u64,
    pub b: i64,
    pub h: i64,
}

impl AffineForm {
    pub fn shift(a: u64, h: i64) -> AffineForm {
        AffineForm { a, b: 0, h }
    }

    fn offset(&self) -> i64 {
        self.b + self.h
    }
}

/// `sum_{1 <= n <= X} prod_j f(a_j n + b_j + h_j)`, evaluated blockwise.
pub fn chowla_sum(x: u64, forms: &[AffineForm], f: &MultFn) -> Result<Complex64> {
    if forms.is_empty() {
        return Err(Error::precondition("need at least one affine form".to_string()));
    }
    for form in forms {
        if form.a < 1 {
            return Err(Error::precondition(format!("a = {} must be >= 1", form.a)));
        }
        if form.a as i64 + form.offset() < 1 {
            return Err(Error::domain(format!(
                "form {:?} evaluates below 1 at n = 1",
                form
            )));
        }
        let top = form.a as i128 * x as i128 + form.offset() as i128;
        if top > sieve::MAX_N as i128 {
            return Err(Error::capacity(format!(
                "form {:?} reaches {top} at n = {x}, beyond cap {}",
                form,
                sieve::MAX_N
            )));
        }
    }
    let chunk = (sieve::DEFAULT_SEGMENT as u64).min(x);
    let mut acc = KahanComplex::new();
    let mut lo = 1u64;
    while lo <= x {
        let hi = (lo + chunk - 1).min(x);
        // per form: values on the arithmetic progression a n + c, n in [lo, hi]
        let mut per_form: Vec<(Vec<Complex64>, u64, u64)> = Vec::with_capacity(forms.len());
        for form in forms {
            let arg_lo = (form.a as i64 * lo as i64 + form.offset()) as u64;
            let arg_hi = (form.a as i64 * hi as i64 + form.offset()) as u64;
            let vals = f.eval_range(arg_lo, arg_hi)?;
            per_form.push((vals, arg_lo, form.a));
        }
        for n in lo..=hi {
            let mut prod = Complex64::new(1.0, 0.0);
            for (j, form) in forms.iter().enumerate() {
                let (vals, arg_lo, a) = &per_form[j];
                let arg = (*a as i64 * n as i64 + form.offset()) as u64;
                prod *= vals[(arg - arg_lo) as usize];
                if prod.re == 0.0 && prod.im == 0.0 {
                    break;
                }
            }
            acc.add(prod);
        }
        lo = hi + 1;
    }
    Ok(acc.value())
}

/// Monte-Carlo average of normalized correlations over shift tuples.
#[derive(Clone, Debug)]
pub struct AveragedReport {
    pub x: u64,
    pub h_max: u64,
    pub k: u32,
    /// Mean of `|sum_n f(n) f(n+h_2) ... f(n+h_k)| / X`.
    pub mean_abs: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub samples: u64,
    /// Whether every tuple was enumerated (k = 2) instead of sampled.
    pub exhaustive: bool,
}

/// Average `|sum_{n <= X} f(n) f(n+h_2) ... f(n+h_k)|/X` over shift tuples
/// `1 <= h_j <= H` with distinct coordinates. `k = 2` enumerates every shift
/// through the FFT table; `k >= 3` samples tuples with the seeded stream.
pub fn averaged_chowla(
    x: u64,
    h_max: u64,
    k: u32,
    sample_count: u64,
    seed: u64,
    f: &MultFn,
) -> Result<AveragedReport> {
    if k < 2 {
        return Err(Error::precondition("tuple order k must be >= 2".to_string()));
    }
    if k == 2 {
        let table = super::twopoint::two_point_table(x, h_max, f)?;
        let xf = x as f64;
        let vals: Vec<f64> = table.entries[1..].iter().map(|c| c.norm() / xf).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        return Ok(AveragedReport {
            x,
            h_max,
            k,
            mean_abs: mean,
            std_error: (var / n).sqrt(),
            samples: h_max,
            exhaustive: true,
        });
    }
    if sample_count < 30 {
        return Err(Error::precondition(format!(
            "{sample_count} samples give no meaningful error bar; need >= 30"
        )));
    }
    if h_max < (k - 1) as u64 {
        return Err(Error::precondition(format!(
            "cannot draw {} distinct shifts from [1, {h_max}]",
            k - 1
        )));
    }
    let values = f.eval_range(1, x + h_max)?;
    // tuples drawn up front from the seeded stream, then evaluated in parallel
    let mut rng = seeded_rng(seed, 0);
    let tuples: Vec<Vec<u64>> = (0..sample_count)
        .map(|_| {
            let mut shifts: Vec<u64> = Vec::with_capacity(k as usize - 1);
            while shifts.len() < k as usize - 1 {
                let h = rng.gen_range(1..=h_max);
                if !shifts.contains(&h) {
                    shifts.push(h);
                }
            }
            shifts
        })
        .collect();
    let xf = x as f64;
    let abs_vals: Vec<f64> = tuples
        .par_iter()
        .map(|shifts| {
            let mut acc = KahanComplex::new();
            for n in 0..x as usize {
                let mut prod = values[n];
                for &h in shifts {
                    if prod.re == 0.0 && prod.im == 0.0 {
                        break;
                    }
                    prod *= values[n + h as usize];
                }
                acc.add(prod);
            }
            acc.value().norm() / xf
        })
        .collect();
    let n = abs_vals.len() as f64;
    let mean = abs_vals.iter().sum::<f64>() / n;
    let var = abs_vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(AveragedReport {
        x,
        h_max,
        k,
        mean_abs: mean,
        std_error: (var / n).sqrt(),
        samples: sample_count,
        exhaustive: false,
    })
}
