//! Small dense matrices over a [`Scalar`].

use std::fmt;

use crate::error::{AfaError, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    ctx: S::Context,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize, ctx: S::Context) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(ctx); rows * cols],
            ctx,
        }
    }

    pub fn identity(n: usize, ctx: S::Context) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.data[i * n + i] = S::one(ctx);
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have the same length
    /// and there must be at least one entry.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let ctx = rows
            .first()
            .and_then(|r| r.first())
            .map(Scalar::context)
            .ok_or_else(|| AfaError::InvalidParameter("matrix must be non-empty".into()))?;
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(AfaError::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
            ctx,
        })
    }

    /// Convenience constructor for integer matrices written inline.
    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R], ctx: S::Context) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| S::from_i64(x, ctx)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.data[row * self.cols + col] = value;
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut S {
        &mut self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[S] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column_sums(&self) -> Vec<S> {
        let ctx = self.context();
        let mut sums = vec![S::zero(ctx); self.cols];
        for r in 0..self.rows {
            for (c, sum) in sums.iter_mut().enumerate() {
                sum.add_assign_ref(self.get(r, c));
            }
        }
        sums
    }

    /// Entry-wise conversion into another backend.
    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, ctx: T::Context, f: F) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx,
        }
    }

    /// Matrix product `self * rhs`. Zero entries of `self` are skipped, which
    /// keeps products with sparse routing matrices cheap.
    pub fn mul(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != rhs.rows {
            return Err(AfaError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::<S>::zeros(self.rows, rhs.cols, self.context());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j].mul_add_assign(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if self.cols != v.len() {
            return Err(AfaError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let ctx = self.context();
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = S::zero(ctx);
                for (a, x) in self.row(i).iter().zip(v) {
                    acc.mul_add_assign(a, x);
                }
                acc
            })
            .collect())
    }

    /// Kronecker product with row-major index order:
    /// entry `((i1, i2), (j1, j2))` sits at `(i1 * rhs.rows + i2, j1 * rhs.cols + j2)`.
    pub fn kron(&self, rhs: &Matrix<S>) -> Matrix<S> {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Matrix::<S>::zeros(rows, cols, self.context());
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        let b = rhs.get(i2, j2);
                        if !b.is_zero() {
                            out.set(i1 * rhs.rows + i2, j1 * rhs.cols + j2, a.mul(b));
                        }
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal stacking of square blocks.
    pub fn block_diag(blocks: &[Matrix<S>]) -> Result<Matrix<S>> {
        let first = blocks.first().ok_or_else(|| {
            AfaError::InvalidParameter("block_diag needs at least one block".into())
        })?;
        for b in blocks {
            if !b.is_square() {
                return Err(AfaError::NotSquare {
                    rows: b.rows,
                    cols: b.cols,
                });
            }
        }
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(n, n, first.context());
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(offset + i, offset + j, b.get(i, j).clone());
                }
            }
            offset += b.rows;
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Result<Matrix<S>> {
        if !self.is_square() {
            return Err(AfaError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Matrix::identity(self.rows, self.context());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn context(&self) -> S::Context {
        self.ctx
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
