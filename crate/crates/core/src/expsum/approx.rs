//! Dirichlet rational approximation and major/minor arc labels.

use crate::error::{Error, Result};
use crate::util::gcd;

/// A reduced fraction `a/q` approximating `alpha` (mod 1) with the Dirichlet
/// box guarantee `|alpha - a/q| <= 1/(q * qcap)`, `q <= qcap`.
#[derive(Clone, Copy, Debug)]
pub struct RationalApprox {
    /// `alpha` reduced to `[0, 1)`.
    pub alpha: f64,
    pub a: u64,
    pub q: u64,
    pub err: f64,
    pub qcap: u64,
}

/// Best rational approximation with denominator at most `qcap`, from the
/// continued-fraction convergents of `alpha` plus an intermediate-fraction
/// improvement step.
pub fn dirichlet_approx(alpha: f64, qcap: u64) -> Result<RationalApprox> {
    if qcap < 1 {
        return Err(Error::precondition("qcap must be >= 1".to_string()));
    }
    let frac = alpha.rem_euclid(1.0);
    // convergent recurrences: p/q trails (prev, cur)
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p_cur, mut q_cur) = (0u64, 1u64); // 0/1 is the 0th convergent of frac < 1
    let mut x = frac;
    let mut overshoot: Option<(u64, u64, u64)> = None; // (a_k, p_next, q_next) past the cap
    for _ in 0..64 {
        if x.abs() < 1e-13 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor() as u64;
        x -= a as f64;
        let p_next = match a.checked_mul(p_cur).and_then(|v| v.checked_add(p_prev)) {
            Some(v) => v,
            None => break,
        };
        let q_next = match a.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) {
            Some(v) => v,
            None => break,
        };
        if q_next > qcap {
            overshoot = Some((a, p_next, q_next));
            break;
        }
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    let err_of = |p: u64, q: u64| (frac - p as f64 / q as f64).abs();
    let (mut a_best, mut q_best) = (p_cur, q_cur);
    let mut err_best = err_of(p_cur, q_cur);
    // intermediate fractions (j p_cur + p_prev)/(j q_cur + q_prev) walk from
    // the previous convergent toward the one past the cap; take the deepest
    // admissible one if it actually improves and keeps the box bound
    if let Some((a_next, _, _)) = overshoot {
        if q_cur > 0 {
            let j_max = (qcap - q_prev) / q_cur;
            if j_max >= 1 && j_max < a_next {
                let p_mid = j_max * p_cur + p_prev;
                let q_mid = j_max * q_cur + q_prev;
                let err_mid = err_of(p_mid, q_mid);
                if err_mid < err_best && err_mid <= 1.0 / (q_mid as f64 * qcap as f64) {
                    a_best = p_mid;
                    q_best = q_mid;
                    err_best = err_mid;
                }
            }
        }
    }
    debug_assert!(gcd(a_best.max(1), q_best) == 1 || a_best == 0);
    Ok(RationalApprox { alpha: frac, a: a_best, q: q_best, err: err_best, qcap })
}

/// Major/minor classification of a frequency by its approximation denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcKind {
    Major,
    Minor,
}

#[derive(Clone, Copy, Debug)]
pub struct ArcLabel {
    pub kind: ArcKind,
    pub w: f64,
    pub approx: RationalApprox,
}

/// Major iff `q <= W` (the boundary is major).
pub fn classify_arc(approx: RationalApprox, w: f64) -> ArcLabel {
    let kind = if (approx.q as f64) <= w {
        ArcKind::Major
    } else {
        ArcKind::Minor
    };
    ArcLabel { kind, w, approx }
}
