//! Small numeric helpers shared across the crate.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The standard additive character `e(x) = exp(2*pi*i*x)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let theta = std::f64::consts::TAU * x;
    Complex64::new(theta.cos(), theta.sin())
}

/// `p^{it}` evaluated as `exp(i t ln p)`.
#[inline]
pub fn unit_power(p: u64, t: f64) -> Complex64 {
    let theta = t * (p as f64).ln();
    Complex64::new(theta.cos(), theta.sin())
}

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
#[inline]
pub fn dist_to_nearest_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Kahan-compensated accumulator for long floating-point sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Kahan accumulation for complex values (componentwise).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Deterministic RNG stream for worker `index` under master `seed`.
///
/// ChaCha streams are disjoint across indices, so parallel workers can draw
/// independently while the run as a whole stays reproducible.
pub fn seeded_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Golden-section minimization of a unimodal function on `[a, b]`
/// down to bracket width `tol`. Returns `(argmin, min)`.
pub fn golden_section_min(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    if fmid <= fc && fmid <= fd {
        (mid, fmid)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Euclidean gcd on unsigned integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}
