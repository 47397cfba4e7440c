//! Correlation sums, FFT two-point tables, averaged decay measurements, the
//! window-autocorrelation identity, and short-interval variance.

mod chowla;
mod fourier;
mod twopoint;
mod variance;

pub use chowla::{averaged_chowla, chowla_sum, AffineForm, AveragedReport};
pub use fourier::{fourier_identity_check, FourierCheck};
pub use twopoint::{two_point_naive, two_point_table, CorrelationReport};
pub use variance::{short_interval_variance, variance_from_values, VarianceReport};
