//! Cyclic Jacobi eigen-decomposition used as an independent dense oracle.

use crate::dense::DenseMatrix;
use crate::scalar::Scalar;
use crate::sparse::SparseSymmetric;

use super::EigenError;

/// Largest dimension accepted by [`dense_oracle_eig`].
pub const ORACLE_MAX_DIM: usize = 2000;

const MAX_SWEEPS: usize = 100;

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: DenseMatrix<T>,
    pub sweeps: usize,
}

impl<T: Scalar> DenseEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<T> {
        self.vectors.column(j)
    }
}

/// Full eigen-decomposition by row-cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm of the rotated matrix is at
/// most `1e-12·‖A‖_F` (or ten machine epsilons for narrower types).
pub fn dense_oracle_eig<T: Scalar>(a: &SparseSymmetric<T>) -> Result<DenseEigen<T>, EigenError> {
    if a.n() > ORACLE_MAX_DIM {
        return Err(EigenError::OracleTooLarge {
            n: a.n(),
            max: ORACLE_MAX_DIM,
        });
    }
    jacobi(a.to_dense())
}

/// Jacobi on an explicit dense symmetric matrix.
pub fn jacobi<T: Scalar>(mut a: DenseMatrix<T>) -> Result<DenseEigen<T>, EigenError> {
    let n = a.rows();
    let mut v = DenseMatrix::identity(n);
    let tol = T::of(1e-12).max(T::epsilon() * T::of(10.0)) * a.norm_fro();
    let zero = T::zero();
    let one = T::one();
    let two = one + one;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > tol {
        if sweeps == MAX_SWEEPS {
            return Err(EigenError::OracleNoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == zero {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + one).sqrt());
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .partial_cmp(&a[(j, j)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(DenseEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}
