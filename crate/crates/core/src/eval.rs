//! Area under the cumulative recall curve.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("empty error list")]
    EmptyInput,
    #[error("threshold must be positive")]
    InvalidThreshold,
}

/// AUC of the recall curve `r(x) = fraction of errors ≤ x` over
/// `[0, threshold]`, normalized by the threshold.
///
/// The recall curve is a step function, so the integral reduces to
/// `Σ max(0, t − eᵢ) / (n·t)` over finite errors; failed estimates enter as
/// infinite error and contribute zero. The result is always in [0, 1] and is
/// nondecreasing in the threshold.
pub fn auc(errors: &[f64], threshold: f64) -> Result<f64, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(EvalError::InvalidThreshold);
    }
    let total: f64 = errors
        .iter()
        .filter(|e| e.is_finite() && **e <= threshold)
        .map(|e| threshold - e.max(0.0))
        .sum();
    Ok(total / (errors.len() as f64 * threshold))
}

/// AUC at several thresholds.
pub fn auc_at(errors: &[f64], thresholds: &[f64]) -> Result<Vec<f64>, EvalError> {
    thresholds.iter().map(|&t| auc(errors, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_cases() {
        assert_eq!(auc(&[0.0, 0.0, 0.0], 3.0), Ok(1.0));
        assert_eq!(auc(&[10.0, 10.0], 3.0), Ok(0.0));
        assert_eq!(auc(&[], 3.0), Err(EvalError::EmptyInput));
        assert_eq!(auc(&[1.0], 0.0), Err(EvalError::InvalidThreshold));
    }

    #[test]
    fn single_step() {
        // r(x) jumps to 1 at 1.5, so the area is (3 − 1.5)/3 = 0.5.
        assert_eq!(auc(&[1.5], 3.0), Ok(0.5));
    }

    #[test]
    fn failures_count_as_zero_contribution() {
        let errors = [0.0, f64::INFINITY];
        assert_eq!(auc(&errors, 3.0), Ok(0.5));
        let with_nan = [0.0, f64::NAN];
        assert_eq!(auc(&with_nan, 3.0), Ok(0.5));
    }

    #[test]
    fn monotone_in_threshold() {
        let errors = [0.3, 1.0, 2.7, 4.0, 9.0, f64::INFINITY];
        let values = auc_at(&errors, &[1.0, 3.0, 5.0, 10.0]).unwrap();
        for w in values.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
    }
}
