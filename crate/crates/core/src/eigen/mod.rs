//! Extreme eigenpairs of sparse symmetric matrices.
//!
//! The largest pairs come from block Lanczos on `A`; the smallest from block
//! Lanczos on `(A − σI)⁻¹` with a small negative shift `σ = −ε_σ‖A‖₁`, which
//! keeps the factored operator positive definite even when `A` is singular.
//! Both runs keep the full Krylov basis and reorthogonalize every new
//! vector against it.

mod jacobi;
mod lanczos;

pub use jacobi::{dense_oracle_eig, jacobi, DenseEigen, ORACLE_MAX_DIM};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cholesky::{CholeskyError, EnvelopeCholesky};
use crate::dense::QlNoConvergence;
use crate::scalar::Scalar;
use crate::sparse::SparseSymmetric;

use lanczos::{block_lanczos, Ritz};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("requested {requested} eigenpairs but the matrix has dimension {n}")]
    TooManyPairs { requested: usize, n: usize },
    #[error("no eigenpairs requested")]
    NothingRequested,
    #[error(
        "{end} eigenpairs did not converge within {steps} Lanczos vectors; \
         achieved residuals {residuals:?} (limit {limit:e})"
    )]
    NotConverged {
        end: Extreme,
        steps: usize,
        residuals: Vec<f64>,
        limit: f64,
    },
    #[error("shift-invert factorization failed: {0}")]
    Factorization(#[from] CholeskyError),
    #[error("Rayleigh-Ritz step failed: {0}")]
    Ritz(#[from] QlNoConvergence),
    #[error("dense oracle limited to n <= {max}, got {n}")]
    OracleTooLarge { n: usize, max: usize },
    #[error("Jacobi oracle did not converge after {sweeps} sweeps")]
    OracleNoConvergence { sweeps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

impl std::fmt::Display for Extreme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Extreme::Smallest => "smallest",
            Extreme::Largest => "largest",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative residual tolerance: a pair is accepted when
    /// `‖Au − λu‖ ≤ tol·max(1, ‖A‖₁)`.
    pub tol: f64,
    /// Seed for the random starting block.
    pub seed: u64,
    /// `ε_σ` in the shift `σ = −ε_σ‖A‖₁` used for the smallest pairs.
    pub shift_factor: f64,
    /// Maximum Krylov basis size per end; `None` means
    /// `10·(n_s + n_l) + 200`.
    pub max_steps: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            seed: 42,
            shift_factor: 1e-8,
            max_steps: None,
        }
    }
}

/// Unit eigenvector with its eigenvalue and achieved residual `‖Au − λu‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    pub vector: Vec<T>,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSet<T> {
    /// The `n_s` smallest pairs, ascending.
    pub smallest: Vec<EigenPair<T>>,
    /// The `n_l` largest pairs, ascending (so the last is `λ_n`).
    pub largest: Vec<EigenPair<T>>,
    pub n: usize,
    pub norm1: T,
    /// Shift used for the smallest pairs.
    pub shift: T,
    pub seed: u64,
    /// Krylov basis sizes reached for (smallest, largest).
    pub steps: (usize, usize),
}

impl<T: Scalar> EigenSet<T> {
    /// 1-based spectral index of `largest[j]`.
    pub fn largest_index(&self, j: usize) -> usize {
        self.n - self.largest.len() + j + 1
    }

    /// Residual acceptance bound `tol·max(1, ‖A‖₁)`.
    pub fn residual_limit(&self, tol: f64) -> f64 {
        tol * self.norm1.as_f64().max(1.0)
    }
}

/// Compute the `n_s` smallest and `n_l` largest eigenpairs of `a`.
pub fn solve_extreme_eigenpairs<T: Scalar>(
    a: &SparseSymmetric<T>,
    n_s: usize,
    n_l: usize,
    options: &EigenOptions,
) -> Result<EigenSet<T>, EigenError> {
    let n = a.n();
    if n_s + n_l == 0 {
        return Err(EigenError::NothingRequested);
    }
    if n_s + n_l > n {
        return Err(EigenError::TooManyPairs {
            requested: n_s + n_l,
            n,
        });
    }
    let norm1 = a.norm1();
    let limit = T::of(options.tol) * norm1.max(T::one());
    let max_steps = options.max_steps.unwrap_or(10 * (n_s + n_l) + 200);
    let scale = if norm1 > T::zero() { norm1 } else { T::one() };
    let shift = -T::of(options.shift_factor) * scale;

    let mut smallest = Vec::new();
    let mut steps = (0, 0);
    if n_s > 0 {
        let chol = EnvelopeCholesky::factor(a, shift)?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let op = |x: &[T], y: &mut [T]| {
            y.copy_from_slice(x);
            chol.solve_in_place(y).expect("dimension checked");
        };
        let ritz = block_lanczos(a, op, n_s, max_steps, limit, &mut rng)?;
        steps.0 = ritz.steps;
        smallest = finish(ritz, Extreme::Smallest, limit)?;
    }

    let mut largest = Vec::new();
    if n_l > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(1));
        let op = |x: &[T], y: &mut [T]| a.matvec_into(x, y).expect("dimension checked");
        let ritz = block_lanczos(a, op, n_l, max_steps, limit, &mut rng)?;
        steps.1 = ritz.steps;
        largest = finish(ritz, Extreme::Largest, limit)?;
    }

    Ok(EigenSet {
        smallest,
        largest,
        n,
        norm1,
        shift,
        seed: options.seed,
        steps,
    })
}

fn finish<T: Scalar>(
    ritz: Ritz<T>,
    end: Extreme,
    limit: T,
) -> Result<Vec<EigenPair<T>>, EigenError> {
    if !ritz.converged {
        return Err(EigenError::NotConverged {
            end,
            steps: ritz.steps,
            residuals: ritz.pairs.iter().map(|p| p.residual.as_f64()).collect(),
            limit: limit.as_f64(),
        });
    }
    let mut pairs = ritz.pairs;
    pairs.sort_by(|p, q| {
        p.value
            .partial_cmp(&q.value)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(pairs)
}
