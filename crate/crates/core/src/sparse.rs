//! Compressed sparse symmetric matrix holding the upper triangle only.

use std::collections::BTreeMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("dimension mismatch: matrix is {expected}x{expected}, vector has length {found}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub found: usize,
}

/// Symmetric matrix stored as upper-triangular CSR (`row <= col`).
///
/// Within a row, column indices are strictly increasing and no stored value
/// is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Accumulates upper-triangle contributions in insertion order.
#[derive(Debug, Clone)]
pub struct SymmetricBuilder<T> {
    rows: Vec<BTreeMap<usize, T>>,
}

impl<T: Scalar> SymmetricBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![BTreeMap::new(); n],
        }
    }

    /// Add `value` at `(i, j)`. Entries below the diagonal are mirrored into
    /// the upper triangle, so callers adding a full symmetric block should
    /// only pass pairs with `i <= j`.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        *self.rows[r].entry(c).or_insert_with(T::zero) += value;
    }

    pub fn build(self) -> SparseSymmetric<T> {
        let n = self.rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (c, v) in row {
                if v != T::zero() {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseSymmetric {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl<T: Scalar> SparseSymmetric<T> {
    pub fn zeros(n: usize) -> Self {
        SymmetricBuilder::new(n).build()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut b = SymmetricBuilder::new(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.add(i, i, d);
        }
        b.build()
    }

    /// Build from `(row, col, value)` triplets; lower-triangle triplets are
    /// mirrored and summed with their upper counterparts.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut b = SymmetricBuilder::new(n);
        for (i, j, v) in triplets {
            b.add(i, j, v);
        }
        b.build()
    }

    /// Take the upper triangle of a dense symmetric matrix.
    pub fn from_dense_upper(a: &DenseMatrix<T>) -> Self {
        assert_eq!(a.rows(), a.cols(), "matrix must be square");
        let n = a.rows();
        let mut b = SymmetricBuilder::new(n);
        for i in 0..n {
            for j in i..n {
                b.add(i, j, a[(i, j)]);
            }
        }
        b.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (upper triangle) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row `i`: columns `>= i` with their values.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All stored entries as `(row, col, value)` with `row <= col`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Maximum absolute column sum (equal to the infinity norm).
    pub fn norm1(&self) -> T {
        let mut sums = vec![T::zero(); self.n];
        for (i, j, v) in self.upper_entries() {
            sums[j] += v.abs();
            if i != j {
                sums[i] += v.abs();
            }
        }
        sums.into_iter().fold(T::zero(), T::max)
    }

    pub fn norm_fro(&self) -> T {
        let two = T::one() + T::one();
        self.upper_entries()
            .map(|(i, j, v)| if i == j { v * v } else { two * v * v })
            .sum::<T>()
            .sqrt()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>, DimensionMismatch> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = A x` into a caller-provided buffer.
    ///
    /// Reads `self` and `x` only, so concurrent calls on distinct outputs are
    /// safe. Summation order is fixed by the storage layout.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) -> Result<(), DimensionMismatch> {
        if x.len() != self.n {
            return Err(DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(DimensionMismatch {
                expected: self.n,
                found: y.len(),
            });
        }
        y.iter_mut().for_each(|v| *v = T::zero());
        for i in 0..self.n {
            let xi = x[i];
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let v = self.values[k];
                acc += v * x[j];
                if j != i {
                    y[j] += v * xi;
                }
            }
            y[i] += acc;
        }
        Ok(())
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T, DimensionMismatch> {
        let y = self.matvec(x)?;
        Ok(crate::scalar::dot(x, &y))
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.upper_entries() {
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
        d
    }

    /// Multiply every entry by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Dump the upper triangle in coordinate text form: a `# n nnz` header,
    /// then one `row col value` line per stored entry (0-based indices,
    /// 17 significant digits).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} {}", self.n, self.nnz())?;
        for (i, j, v) in self.upper_entries() {
            writeln!(w, "{} {} {:.16e}", i, j, v)?;
        }
        Ok(())
    }
}
