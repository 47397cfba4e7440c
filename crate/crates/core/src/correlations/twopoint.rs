//! Two-point correlation tables `c(h) = sum_{n <= X-h} f(n) conj(f(n+h))`,
//! FFT-accelerated with a chunked cross-correlation so memory stays at the
//! FFT block size rather than the full range.

use crate::dirichlet::MultFn;
use crate::error::{Error, Result};
use crate::util::KahanComplex;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Per-shift correlation sums for `0 <= h <= h_max`.
#[derive(Clone, Debug)]
pub struct CorrelationReport {
    pub x: u64,
    pub h_max: u64,
    /// `entries[h] = c(h)`.
    pub entries: Vec<Complex64>,
}

impl CorrelationReport {
    /// Mean of `|c(h)|/X` over `1 <= h <= h_cap`.
    pub fn abs_mean_over(&self, h_cap: u64) -> Result<f64> {
        if h_cap < 1 || h_cap > self.h_max {
            return Err(Error::domain(format!(
                "h_cap = {h_cap} outside [1, {}]",
                self.h_max
            )));
        }
        let xf = self.x as f64;
        let sum: f64 = self.entries[1..=h_cap as usize]
            .iter()
            .map(|c| c.norm() / xf)
            .sum();
        Ok(sum / h_cap as f64)
    }

    /// `#{1 <= h <= h_max : |c(h)| > delta X}` plus the comparison ceiling
    /// `H^(1 - delta/5000)` (reported, not asserted: its threshold scale is
    /// an unspecified `H(delta)`).
    pub fn exceptional_count(&self, delta: f64) -> Result<(u64, f64)> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::precondition(format!("delta = {delta} outside (0, 1]")));
        }
        let cut = delta * self.x as f64;
        let count = self.entries[1..]
            .iter()
            .filter(|c| c.norm() > cut)
            .count() as u64;
        let ceiling = (self.h_max as f64).powf(1.0 - delta / 5000.0);
        Ok((count, ceiling))
    }
}

fn check_two_point_args(x: u64, h_max: u64) -> Result<()> {
    if x > 1_000_000_000 {
        return Err(Error::capacity(format!("X = {x} beyond the 10^9 table cap")));
    }
    if h_max > 1_000_000 {
        return Err(Error::capacity(format!("H = {h_max} beyond the 10^6 shift cap")));
    }
    if h_max >= x {
        return Err(Error::precondition(format!("need H < X, got H = {h_max}, X = {x}")));
    }
    Ok(())
}

/// FFT-accelerated table; matches the naive double loop within an absolute
/// `1e-6 * X` per entry (floating accumulation through the transforms).
pub fn two_point_table(x: u64, h_max: u64, f: &MultFn) -> Result<CorrelationReport> {
    check_two_point_args(x, h_max)?;
    let values = f.eval_range(1, x)?;
    Ok(two_point_fft(&values, x, h_max))
}

pub(crate) fn two_point_fft(values: &[Complex64], x: u64, h_max: u64) -> CorrelationReport {
    let h = h_max as usize;
    let fft_len = ((4 * (h + 1)).next_power_of_two()).max(1 << 12);
    let block = fft_len - h - 1;
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(fft_len);
    let inverse = planner.plan_fft_inverse(fft_len);

    // per block [s, s+B): sum_{n in block} f(n) conj(f(n+h)) for all h at
    // once. With ext = f on [s, s+B+h) and blk = f on [s, s+B),
    // IFFT(FFT(ext) * conj(FFT(blk)))[h] / L = sum_j ext[j+h] conj(blk[j]),
    // which is the conjugate of the wanted block sum.
    let mut entries = vec![Complex64::new(0.0, 0.0); h + 1];
    let mut ext = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut blk = vec![Complex64::new(0.0, 0.0); fft_len];
    let n_total = x as usize;
    let mut start = 0usize; // 0-based index of n = start + 1
    while start < n_total {
        let len_blk = block.min(n_total - start);
        let len_ext = (block + h).min(n_total - start);
        blk[..len_blk].copy_from_slice(&values[start..start + len_blk]);
        blk[len_blk..].fill(Complex64::new(0.0, 0.0));
        ext[..len_ext].copy_from_slice(&values[start..start + len_ext]);
        ext[len_ext..].fill(Complex64::new(0.0, 0.0));
        forward.process(&mut ext);
        forward.process(&mut blk);
        for (ei, bi) in ext.iter_mut().zip(blk.iter()) {
            *ei *= bi.conj();
        }
        inverse.process(&mut ext);
        let scale = 1.0 / fft_len as f64;
        for (dst, src) in entries.iter_mut().zip(ext.iter().take(h + 1)) {
            *dst += (src * scale).conj();
        }
        start += block;
    }
    CorrelationReport { x, h_max, entries }
}

/// The reference double loop with compensated accumulation; the oracle the
/// FFT path is validated against.
pub fn two_point_naive(x: u64, h_max: u64, f: &MultFn) -> Result<CorrelationReport> {
    check_two_point_args(x, h_max)?;
    let values = f.eval_range(1, x)?;
    let mut entries = Vec::with_capacity(h_max as usize + 1);
    for h in 0..=h_max as usize {
        let mut acc = KahanComplex::new();
        for n in 0..(x as usize - h) {
            acc.add(values[n] * values[n + h].conj());
        }
        entries.push(acc.value());
    }
    Ok(CorrelationReport { x, h_max, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liouville_c0_is_x() {
        let r = two_point_table(10_000, 16, &MultFn::liouville()).unwrap();
        assert!((r.entries[0].re - 10_000.0).abs() < 1e-6);
        assert!(r.entries[0].im.abs() < 1e-6);
    }

    #[test]
    fn constant_function_counts_overlap() {
        // f = 1: c(h) = X - h exactly
        let x = 4_000u64;
        let r = two_point_table(x, 50, &MultFn::one()).unwrap();
        for h in 0..=50u64 {
            let expect = (x - h) as f64;
            assert!(
                (r.entries[h as usize].re - expect).abs() < 1e-6,
                "c({h}) = {:?}",
                r.entries[h as usize]
            );
        }
    }

    #[test]
    fn fft_matches_naive_for_liouville() {
        let x = 10_000u64;
        let f = MultFn::liouville();
        let fft = two_point_table(x, 100, &f).unwrap();
        let naive = two_point_naive(x, 100, &f).unwrap();
        let tol = 1e-6 * x as f64;
        for h in 0..=100usize {
            let d = (fft.entries[h] - naive.entries[h]).norm();
            assert!(d <= tol, "h = {h}: fft {:?} naive {:?}", fft.entries[h], naive.entries[h]);
        }
    }

    #[test]
    fn fft_matches_naive_for_complex_values() {
        let x = 3_000u64;
        let f = MultFn::archimedean(2.0);
        let fft = two_point_table(x, 64, &f).unwrap();
        let naive = two_point_naive(x, 64, &f).unwrap();
        for h in 0..=64usize {
            let d = (fft.entries[h] - naive.entries[h]).norm();
            assert!(d <= 1e-6 * x as f64, "h = {h}");
        }
    }

    #[test]
    fn hermitian_symmetry_via_reflection() {
        // c(-h) = conj(c(h)) once the table is extended by reflecting the
        // range: sum_n f(n) conj(f(n-h)) = conj(sum_m f(m) conj(f(m+h)))
        let x = 2_000u64;
        let f = MultFn::archimedean(1.0);
        let values = f.eval_range(1, x).unwrap();
        for h in 1..=20usize {
            let mut pos = Complex64::new(0.0, 0.0);
            for n in 0..(x as usize - h) {
                pos += values[n] * values[n + h].conj();
            }
            let mut neg = Complex64::new(0.0, 0.0);
            for n in h..x as usize {
                neg += values[n] * values[n - h].conj();
            }
            assert!((neg - pos.conj()).norm() < 1e-9, "h = {h}");
        }
    }

    #[test]
    fn exceptional_count_for_constant_f() {
        // f = 1: c(h) = X - h, so h is exceptional iff h < (1 - delta) X
        let x = 1_000u64;
        let r = two_point_table(x, 500, &MultFn::one()).unwrap();
        let delta = 0.7;
        let (count, _ceiling) = r.exceptional_count(delta).unwrap();
        let expect = (1..=500u64)
            .filter(|&h| (x - h) as f64 > delta * x as f64)
            .count() as u64;
        assert_eq!(count, expect);
        assert_eq!(expect, 299); // h < 300
    }

    #[test]
    fn exceptional_count_rejects_bad_delta() {
        let r = two_point_table(1_000, 10, &MultFn::one()).unwrap();
        assert!(r.exceptional_count(1.5).is_err());
        assert!(r.exceptional_count(0.0).is_err());
    }

    #[test]
    fn rejects_oversized_requests() {
        let f = MultFn::one();
        assert!(matches!(
            two_point_table(2_000_000_000, 10, &f),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(two_point_table(100, 200, &f), Err(Error::Precondition(_))));
    }
}
