//! Dense Gaussian elimination with partial pivoting.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("linear system is singular (pivot column {column})")]
pub struct SingularSystem {
    pub column: usize,
}

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    /// Solves `self · x = b`, consuming the matrix.
    ///
    /// Rows whose entry in the current pivot column is exactly zero are
    /// skipped during elimination, which keeps the cost close to linear in
    /// the number of non-zeros for the banded systems model checking produces.
    pub fn solve(mut self, mut b: Vec<T>) -> Result<Vec<T>, SingularSystem> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        let a = &mut self.data;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).expect("finite entries")
                })
                .expect("non-empty range");
            let pivot = a[pivot_row * n + col];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(SingularSystem { column: col });
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                b.swap(col, pivot_row);
            }
            for row in col + 1..n {
                let factor = a[row * n + col] / pivot;
                if factor == T::zero() {
                    continue;
                }
                a[row * n + col] = T::zero();
                for k in col + 1..n {
                    let upper = a[col * n + k];
                    if upper != T::zero() {
                        a[row * n + k] = a[row * n + k] - factor * upper;
                    }
                }
                b[row] = b[row] - factor * b[col];
            }
        }
        for row in (0..n).rev() {
            let tail = (row + 1..n).fold(T::zero(), |acc, k| acc + a[row * n + k] * b[k]);
            b[row] = (b[row] - tail) / a[row * n + row];
        }
        Ok(b)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Largest absolute residual `|A x − b|`.
pub fn residual<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> T {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .fold(T::zero(), |acc, (ax, bi)| acc.max((*ax - *bi).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_a_system_that_needs_pivoting() {
        let mut a = Matrix::<f64>::zeros(3);
        let rows = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        let x = a.clone().solve(vec![5.0, 3.0, 6.0]).unwrap();
        assert!(residual(&a, &x, &[5.0, 3.0, 6.0]) < 1e-12);
    }

    #[test]
    fn reports_singular_matrix() {
        let mut a = Matrix::<f64>::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        assert!(a.solve(vec![1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn diagonally_dominant_systems_have_small_residual(
            entries in proptest::collection::vec(-1.0f64..1.0, 36),
            rhs in proptest::collection::vec(-10.0f64..10.0, 6),
        ) {
            let mut a = Matrix::<f64>::zeros(6);
            for i in 0..6 {
                for j in 0..6 {
                    a[(i, j)] = entries[i * 6 + j];
                }
                a[(i, i)] += 7.0;
            }
            let x = a.clone().solve(rhs.clone()).unwrap();
            prop_assert!(residual(&a, &x, &rhs) < 1e-12);
        }
    }
}
