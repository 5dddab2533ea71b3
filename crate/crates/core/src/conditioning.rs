//! Spectral condition-number estimate `κ₂ = λ_max / λ_min` for symmetric
//! positive semi-definite matrices.

use thiserror::Error;

use crate::eigen::{solve_extreme_eigenpairs, EigenError, EigenOptions};
use crate::scalar::Scalar;
use crate::sparse::SparseSymmetric;

/// Default ill-conditioning threshold, roughly `1 / (1000·u)` for binary64.
pub const DEFAULT_THRESHOLD: f64 = 1e10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("cannot estimate the condition of an empty matrix")]
    Empty,
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate<T> {
    /// `λ_max / λ_min`, or `+∞` when `λ_min` is numerically zero.
    pub kappa: T,
    pub lambda_max: T,
    /// Smallest eigenvalue; reported as exactly zero when it falls below
    /// `rank_tolerance`.
    pub lambda_min: T,
    /// `n·ε·‖A‖₁`; smaller eigenvalues count as zero.
    pub rank_tolerance: T,
    pub threshold: f64,
    pub ill_conditioned: bool,
}

impl<T: Scalar> ConditionEstimate<T> {
    pub fn is_singular(&self) -> bool {
        self.kappa.is_infinite()
    }

    fn from_extremes(lambda_min: T, lambda_max: T, rank_tolerance: T, threshold: f64) -> Self {
        let (lambda_min, kappa) = if lambda_min <= rank_tolerance {
            (T::zero(), T::infinity())
        } else {
            (lambda_min, lambda_max / lambda_min)
        };
        Self {
            kappa,
            lambda_max,
            lambda_min,
            rank_tolerance,
            threshold,
            ill_conditioned: kappa.as_f64() > threshold,
        }
    }
}

/// Eigenvalues at or below `n·ε·‖A‖₁` are indistinguishable from zero.
pub fn rank_tolerance<T: Scalar>(a: &SparseSymmetric<T>) -> T {
    T::of(a.n() as f64) * T::epsilon() * a.norm1()
}

/// Estimate `κ₂(A)` from the extreme eigenvalues and compare it with
/// `threshold`.
///
/// A shift-invert factorization breakdown means `A` is not numerically
/// positive semi-definite; it is reported as singular rather than as an
/// error.
pub fn estimate_condition<T: Scalar>(
    a: &SparseSymmetric<T>,
    threshold: f64,
    options: &EigenOptions,
) -> Result<ConditionEstimate<T>, ConditionError> {
    let n = a.n();
    if n == 0 {
        return Err(ConditionError::Empty);
    }
    let tol = rank_tolerance(a);
    if n == 1 {
        let d = a.get(0, 0);
        return Ok(ConditionEstimate::from_extremes(d, d, tol, threshold));
    }

    let lambda_max = solve_extreme_eigenpairs(a, 0, 1, options)?.largest[0].value;
    let lambda_min = match solve_extreme_eigenpairs(a, 1, 0, options) {
        Ok(set) => set.smallest[0].value,
        Err(EigenError::Factorization(_)) => T::zero(),
        Err(e) => return Err(e.into()),
    };
    Ok(ConditionEstimate::from_extremes(
        lambda_min, lambda_max, tol, threshold,
    ))
}
