//! Scalar machinery shared by every other module: complex arithmetic,
//! a reverse-mode tape, Adam, and the learning-rate schedule.

mod adam;
mod complex;
mod gradcheck;
mod schedule;
mod tape;

use std::f64::consts::PI;

pub use adam::{AdamConfig, AdamState};
pub use complex::Complex;
pub use gradcheck::{grad_check, grad_check_tape};
pub use schedule::{lr_schedule, DEFAULT_DECAY, DEFAULT_LR};
pub use tape::{CVar, GradTape, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("loss is not real (imaginary part {imaginary})")]
    NonRealLoss { imaginary: f64 },
    #[error("tape node {index} is not a leaf and cannot be differentiated against")]
    NotALeaf { index: usize },
    #[error("non-finite gradient at index {index}")]
    NonFiniteGradient { index: usize },
    #[error("function is not finite at point ± h along component {component}")]
    NonFiniteEvaluation { component: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Threshold on `|πu|` below which sinc switches to its series.
pub(crate) const SINC_SERIES: f64 = 1e-8;

/// Normalized sinc, `sin(πu)/(πu)`, equal to 1 at the origin.
#[inline]
pub fn sinc(u: f64) -> f64 {
    let x = PI * u;
    if x.abs() < SINC_SERIES {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `d/du sinc(u)`.
#[inline]
pub fn sinc_derivative(u: f64) -> f64 {
    let x = PI * u;
    if x.abs() < 1e-4 {
        PI * (-x / 3.0 + x * x * x / 30.0)
    } else {
        let (s, c) = x.sin_cos();
        PI * (x * c - s) / (x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(1.0).abs() < 1e-15);
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sinc_derivative_matches_differences() {
        for &u in &[0.0, 1e-9, 3e-5, 0.01, 0.37, 2.5, -1.3] {
            let h = 1e-6;
            let fd = (sinc(u + h) - sinc(u - h)) / (2.0 * h);
            assert!((sinc_derivative(u) - fd).abs() < 1e-8, "u={u}");
        }
    }
}
