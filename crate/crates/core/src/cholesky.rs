//! Envelope (skyline) Cholesky factorization of shifted sparse symmetric
//! matrices.
//!
//! Fill-in of `L` is confined to each row's envelope: row `i` spans columns
//! from the first nonzero of row `i` in the lower triangle up to the diagonal.
//! No reordering is applied.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::sparse::SparseSymmetric;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum CholeskyError {
    #[error("matrix is not numerically positive definite: pivot {index} = {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("right-hand side has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// `L Lᵀ = A − σ I` in envelope storage.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky<T> {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> EnvelopeCholesky<T> {
    /// Factor `A − shift·I`.
    pub fn factor(a: &SparseSymmetric<T>, shift: T) -> Result<Self, CholeskyError> {
        let n = a.n();
        let mut first: Vec<usize> = (0..n).collect();
        for (r, c, _) in a.upper_entries() {
            first[c] = first[c].min(r);
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut values = vec![T::zero(); start[n]];
        for (r, c, v) in a.upper_entries() {
            // lower-triangle position (c, r)
            values[start[c] + (r - first[c])] = v;
        }
        for i in 0..n {
            values[start[i] + (i - first[i])] -= shift;
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let row_j = start[j];
                let lo = fi.max(fj);
                let mut sum = values[row_i + (j - fi)];
                for k in lo..j {
                    sum -= values[row_i + (k - fi)] * values[row_j + (k - fj)];
                }
                let djj = values[row_j + (j - fj)];
                values[row_i + (j - fi)] = sum / djj;
            }
            let mut d = values[row_i + (i - fi)];
            for k in fi..i {
                let l = values[row_i + (k - fi)];
                d -= l * l;
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(CholeskyError::NotPositiveDefinite {
                    index: i,
                    pivot: d.as_f64(),
                });
            }
            values[row_i + (i - fi)] = d.sqrt();
        }
        Ok(Self {
            n,
            first,
            start,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` including fill.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> T {
        self.values[self.start[i] + (j - self.first[i])]
    }

    /// Solve `(A − σI) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) -> Result<(), CholeskyError> {
        if b.len() != self.n {
            return Err(CholeskyError::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        for i in 0..self.n {
            let mut sum = b[i];
            for k in self.first[i]..i {
                sum -= self.l(i, k) * b[k];
            }
            b[i] = sum / self.l(i, i);
        }
        for i in (0..self.n).rev() {
            let xi = b[i] / self.l(i, i);
            b[i] = xi;
            for k in self.first[i]..i {
                let lik = self.l(i, k);
                b[k] -= lik * xi;
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, CholeskyError> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 6;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 2.0));
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
            }
        }
        let a = SparseSymmetric::from_triplets(n, trip);
        let f = EnvelopeCholesky::factor(&a, 0.0).unwrap();
        assert_eq!(f.envelope_size(), 2 * n - 1);
        let x_true: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let b = a.matvec(&x_true).unwrap();
        let x = f.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_shift_makes_singular_matrix_factorable() {
        // graph Laplacian of a path: singular, constant null vector
        let a = SparseSymmetric::from_triplets(
            3,
            [
                (0, 0, 1.0),
                (0, 1, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 2, 1.0),
            ],
        );
        assert!(matches!(
            EnvelopeCholesky::factor(&a, 0.0),
            Err(CholeskyError::NotPositiveDefinite { .. })
        ));
        let f = EnvelopeCholesky::factor(&a, -1e-3).unwrap();
        let x: Vec<f64> = f.solve(&[1.0, 1.0, 1.0]).unwrap();
        // (A + 1e-3 I) 1 = 1e-3 · 1
        for xi in x {
            assert!((xi - 1e3).abs() < 1e-8);
        }
    }

    #[test]
    fn envelope_fill_is_correct() {
        // arrow matrix: last row couples to everything
        let n = 5;
        let mut trip = vec![];
        for i in 0..n {
            trip.push((i, i, 10.0));
            if i + 1 < n {
                trip.push((i, n - 1, 1.0));
            }
        }
        let a = SparseSymmetric::from_triplets(n, trip);
        let f = EnvelopeCholesky::factor(&a, 0.0).unwrap();
        let b: Vec<f64> = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        let x = f.solve(&b).unwrap();
        let r = a.matvec(&x).unwrap();
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
        assert!(f.solve(&[1.0]).is_err());
    }
}
