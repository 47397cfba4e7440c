//! Short-interval exponential sums, exact sliding-window integrals, rational
//! approximation with arc classification, and the computable kernels of the
//! minor-arc machinery.

mod approx;
mod minor;
mod ramare;
mod sweep;

pub use approx::{classify_arc, dirichlet_approx, ArcKind, ArcLabel, RationalApprox};
pub use minor::{
    min_sum_flask, representation_counts, vinogradov_sum, vinogradov_sum_rational, ReprCounts,
    VinogradovReport,
};
pub use ramare::{ramare_decomposition, Ratio};
pub use sweep::{
    short_sum, sup_over_alpha, sweep_integral, sweep_integral_weights, sweep_segments, SupScan,
};
