//! Block Lanczos with full reorthogonalization and Rayleigh–Ritz extraction.

use rand::Rng;

use crate::dense::{symmetric_eigen, DenseMatrix};
use crate::scalar::{axpy, dot, norm2, scale, Scalar};
use crate::sparse::SparseSymmetric;

use super::{EigenError, EigenPair};

pub(super) struct Ritz<T> {
    /// Ritz pairs for the `want` largest operator eigenvalues; `value` is
    /// the Rayleigh quotient with respect to `A`.
    pub pairs: Vec<EigenPair<T>>,
    pub converged: bool,
    pub steps: usize,
}

const RANDOM_RETRIES: usize = 16;

/// Build a Krylov basis of `op` from a random block of `want` vectors until
/// the `want` dominant Ritz pairs have `‖Ax − λx‖ ≤ limit`, the basis spans
/// the whole space, or it reaches `max_steps` vectors.
pub(super) fn block_lanczos<T, F, R>(
    a: &SparseSymmetric<T>,
    mut op: F,
    want: usize,
    max_steps: usize,
    limit: T,
    rng: &mut R,
) -> Result<Ritz<T>, EigenError>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
    R: Rng,
{
    let n = a.n();
    let block = want.min(n);
    let max_steps = max_steps.max(want).min(n);

    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut images: Vec<Vec<T>> = Vec::new();
    // projected[i][j] = q_iᵀ op(q_j), filled for j <= i
    let mut projected: Vec<Vec<T>> = Vec::new();
    let mut pending: Vec<Vec<T>> = (0..block).map(|_| random_vector(rng, n)).collect();

    loop {
        let first_new = basis.len();
        for candidate in pending.drain(..) {
            if basis.len() >= max_steps {
                break;
            }
            let q = match orthonormalize(&basis, candidate) {
                Some(q) => q,
                None => match random_direction(&basis, rng, n) {
                    Some(q) => q,
                    None => continue,
                },
            };
            basis.push(q);
        }
        if basis.len() == first_new && basis.len() < max_steps {
            // the whole block deflated; keep the subspace growing
            if let Some(q) = random_direction(&basis, rng, n) {
                basis.push(q);
            }
        }

        for i in first_new..basis.len() {
            let mut w = vec![T::zero(); n];
            op(&basis[i], &mut w);
            images.push(w);
            let row: Vec<T> = (0..=i).map(|j| dot(&basis[i], &images[j])).collect();
            projected.push(row);
            // entries (j, i) for j < i come from q_jᵀ op(q_i); average with (i, j)
            for j in 0..i {
                let upper = dot(&basis[j], &images[i]);
                let lower = projected[i][j];
                projected[i][j] = (upper + lower) * T::of(0.5);
            }
        }

        let m = basis.len();
        let mut h = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                h[(i, j)] = projected[i][j];
                h[(j, i)] = projected[i][j];
            }
        }
        let (_, y) = symmetric_eigen(&h)?;

        let take = want.min(m);
        let mut pairs = Vec::with_capacity(take);
        for col in (m - take..m).rev() {
            let mut x = vec![T::zero(); n];
            for (k, q) in basis.iter().enumerate() {
                axpy(y[(k, col)], q, &mut x);
            }
            let nx = norm2(&x);
            scale(T::one() / nx, &mut x);
            let ax = a.matvec(&x).expect("dimension fixed");
            let value = dot(&x, &ax);
            let mut r = ax;
            axpy(-value, &x, &mut r);
            pairs.push(EigenPair {
                value,
                vector: x,
                residual: norm2(&r),
            });
        }

        let converged = take == want && pairs.iter().all(|p| p.residual <= limit);
        if converged || m >= max_steps || m == first_new {
            return Ok(Ritz {
                pairs,
                converged,
                steps: m,
            });
        }
        pending = images[first_new..m].to_vec();
    }
}

fn random_vector<T: Scalar, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n)
        .map(|_| T::of(rng.gen::<f64>() * 2.0 - 1.0))
        .collect()
}

fn random_direction<T: Scalar, R: Rng>(basis: &[Vec<T>], rng: &mut R, n: usize) -> Option<Vec<T>> {
    if basis.len() >= n {
        return None;
    }
    (0..RANDOM_RETRIES).find_map(|_| orthonormalize(basis, random_vector(rng, n)))
}

/// Gram–Schmidt against `basis`, repeated while a pass removes more than
/// half the remaining norm. `None` when `v` is numerically in the span.
fn orthonormalize<T: Scalar>(basis: &[Vec<T>], mut v: Vec<T>) -> Option<Vec<T>> {
    let original = norm2(&v);
    if !(original > T::zero()) || !original.is_finite() {
        return None;
    }
    let dependent = original * T::epsilon() * T::of(1e3);
    let mut before = original;
    let mut after = original;
    for _ in 0..3 {
        for q in basis {
            let c = dot(q, &v);
            axpy(-c, q, &mut v);
        }
        after = norm2(&v);
        if after <= dependent {
            return None;
        }
        if after >= before * T::of(0.5) {
            break;
        }
        before = after;
    }
    scale(T::one() / after, &mut v);
    Some(v)
}
