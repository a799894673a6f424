//! Exact combinatorial kernels: log-space matrix permanents (Ryser with Gray
//! codes), permanental minors, elementary symmetric polynomials, and the
//! brute-force permutation-enumeration posterior.

mod enumerate;
mod esp;
mod permanent;

pub use enumerate::{enumerate_posterior, MAX_ENUMERATION_N};
pub(crate) use esp::{esp_ext, esp_ext_skipping};
pub use esp::{esp_log, esp_log_truncated, EspTable};
pub use permanent::{
    permanent_log, permanental_minors_log, MinorTable, LOG_ZERO_FLOOR, MAX_MINORS_N,
    MAX_PERMANENT_N,
};

/// A real number carried as `sign * exp(log_abs)`.
///
/// `sign == 0` iff the value is exactly zero. The sign is kept because
/// Ryser's inclusion–exclusion accumulates signed partial sums even though
/// the permanent of a positive matrix is positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };

    /// A positive value given by its natural log.
    pub fn from_log(log_abs: f64) -> Self {
        debug_assert!(!log_abs.is_nan());
        LogValue { log_abs, sign: 1 }
    }

    /// Builds from a finite real.
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                log_abs: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}
