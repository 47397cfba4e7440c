//! Two independent routes to the window-autocorrelation identity
//!
//! ```text
//! int_T ( int_R |sum_{x <= n <= x+H} f(n) e(alpha n)|^2 dx )^2 d alpha
//!   = sum_{|h| <= H} (H - |h|)^2 |sum_n f(n) conj(f)(n+h)|^2
//! ```
//!
//! for finitely supported `f`. The right side is evaluated exactly from the
//! autocorrelation; the left side goes through the sliding-window sweep (the
//! inner `x`-integral is exact) and a uniform grid in `alpha`. The outer
//! integrand is a trigonometric polynomial of degree below `2H`, so any grid
//! finer than that integrates it exactly up to rounding; coarser grids decay
//! at the rate the quadrature order predicts, which the tests exercise.

use crate::error::{Error, Result};
use crate::expsum::sweep_segments;
use crate::util::{e, Kahan};
use num_complex::Complex64;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug)]
pub struct FourierCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    /// Grid points used for the outer integral.
    pub alpha_points: usize,
}

/// Compare the quadrature left side against the exact right side for a
/// finitely supported `f` given as `(n, f(n))` pairs.
pub fn fourier_identity_check(
    support: &[(i64, Complex64)],
    h: f64,
    quad_step: f64,
) -> Result<FourierCheck> {
    if support.len() > 1_000 {
        return Err(Error::capacity(format!(
            "support of {} points beyond the 10^3 cap",
            support.len()
        )));
    }
    if h <= 0.0 {
        return Err(Error::precondition("window length H must be positive".to_string()));
    }
    if quad_step <= 0.0 || quad_step > 0.5 {
        return Err(Error::precondition(format!("bad quadrature step {quad_step}")));
    }
    let support: Vec<(i64, Complex64)> = support
        .iter()
        .copied()
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .collect();
    if support.is_empty() {
        return Ok(FourierCheck { lhs: 0.0, rhs: 0.0, rel_err: 0.0, alpha_points: 0 });
    }

    // exact right side from the autocorrelation
    let mut auto: HashMap<i64, Complex64> = HashMap::new();
    for &(n, v) in &support {
        for &(m, w) in &support {
            *auto.entry(m - n).or_insert(Complex64::new(0.0, 0.0)) += v * w.conj();
        }
    }
    let mut rhs = Kahan::new();
    for (&d, &c) in &auto {
        let dd = d.abs() as f64;
        if dd <= h {
            let weight = (h - dd) * (h - dd);
            rhs.add(weight * c.norm_sqr());
        }
    }
    let rhs = rhs.value();

    // quadrature left side: dense weights over the support span
    let n_min = support.iter().map(|&(n, _)| n).min().unwrap();
    let n_max = support.iter().map(|&(n, _)| n).max().unwrap();
    let span = (n_max - n_min + 1) as usize;
    let mut dense = vec![Complex64::new(0.0, 0.0); span];
    for &(n, v) in &support {
        dense[(n - n_min) as usize] += v;
    }
    let alpha_points = (1.0 / quad_step).ceil() as usize;
    let x_lo = n_min as f64 - h - 1.0;
    let x_hi = n_max as f64 + 1.0;
    let mut lhs = Kahan::new();
    for j in 0..alpha_points {
        let alpha = j as f64 / alpha_points as f64;
        let phased: Vec<Complex64> = dense
            .iter()
            .enumerate()
            .map(|(i, &v)| v * e(alpha * (n_min + i as i64) as f64))
            .collect();
        let mut inner = Kahan::new();
        sweep_segments(&phased, n_min, h, x_lo, x_hi, |len, s: Complex64| {
            inner.add(s.norm_sqr() * len);
        });
        let v = inner.value();
        lhs.add(v * v);
    }
    let lhs = lhs.value() / alpha_points as f64;

    let rel_err = if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs - rhs).abs() / rhs
    };
    Ok(FourierCheck { lhs, rhs, rel_err, alpha_points })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn single_point_support() {
        // rhs = H^2 |f(n0)|^4; the window integral is |f|^2 over length H
        let check = fourier_identity_check(&[(7, ONE)], 3.0, 1e-3).unwrap();
        assert!((check.rhs - 9.0).abs() < 1e-12);
        assert!(check.rel_err <= 1e-9, "rel err {}", check.rel_err);
    }

    #[test]
    fn two_point_support_hand_value() {
        // f = 1 on {1, 2}, H = 1: only h = 0 survives the (H-|h|)^2 weight,
        // c(0) = 2, so rhs = 1 * |2|^2 = 4
        let check = fourier_identity_check(&[(1, ONE), (2, ONE)], 1.0, 1e-3).unwrap();
        assert!((check.rhs - 4.0).abs() < 1e-12);
        assert!(check.rel_err <= 1e-9, "rel err {}", check.rel_err);
    }

    #[test]
    fn empty_support_is_zero() {
        let check = fourier_identity_check(&[], 5.0, 1e-2).unwrap();
        assert_eq!(check.rel_err, 0.0);
        let zeroed = fourier_identity_check(&[(3, Complex64::new(0.0, 0.0))], 5.0, 1e-2).unwrap();
        assert_eq!(zeroed.rhs, 0.0);
        assert_eq!(zeroed.rel_err, 0.0);
    }

    #[test]
    fn random_complex_support_tight_agreement() {
        use rand::Rng;
        let mut rng = crate::util::seeded_rng(17, 0);
        for trial in 0..20 {
            let size = rng.gen_range(2..=30);
            let mut support = Vec::new();
            let mut used = std::collections::HashSet::new();
            while support.len() < size {
                let n = rng.gen_range(1..=100i64);
                if used.insert(n) {
                    let re: f64 = rng.gen_range(-1.0..1.0);
                    let im: f64 = rng.gen_range(-1.0..1.0);
                    support.push((n, Complex64::new(re, im)));
                }
            }
            let h = rng.gen_range(2..=10) as f64;
            let check = fourier_identity_check(&support, h, 1e-4).unwrap();
            assert!(
                check.rel_err <= 1e-6,
                "trial {trial}: rel err {} (H = {h})",
                check.rel_err
            );
        }
    }

    #[test]
    fn coarse_grids_converge_at_quadrature_order() {
        use rand::Rng;
        let mut rng = crate::util::seeded_rng(23, 0);
        let mut support = Vec::new();
        for n in 0..12i64 {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            support.push((3 * n + 1, Complex64::new(re, im)));
        }
        let h = 8.0;
        // N and 2N grid points with N below the exactness threshold 2H
        let coarse = fourier_identity_check(&support, h, 1.0 / 8.0).unwrap();
        let fine = fourier_identity_check(&support, h, 1.0 / 16.0).unwrap();
        assert!(
            fine.rel_err <= coarse.rel_err / 4.0 || fine.rel_err <= 1e-12,
            "halving the step went {} -> {}",
            coarse.rel_err,
            fine.rel_err
        );
    }
}
