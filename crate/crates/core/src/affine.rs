//! State vectors, affine operators and the weighting operator.

use std::collections::BTreeSet;

use crate::error::{AfaError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Column vector whose entries sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<S: Scalar> {
    entries: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    /// Validates the entry-sum invariant (exact for rationals, within
    /// `2^(-bits/2)` for floats).
    pub fn new(entries: Vec<S>) -> Result<Self> {
        if entries.is_empty() {
            return Err(AfaError::InvalidParameter(
                "state vector needs at least one entry".into(),
            ));
        }
        let v = StateVector { entries };
        let sum = v.entry_sum();
        if !sum.is_one_within_tolerance() {
            return Err(AfaError::NotStateVector {
                sum: sum.to_string(),
            });
        }
        Ok(v)
    }

    pub(crate) fn new_unchecked(entries: Vec<S>) -> Self {
        StateVector { entries }
    }

    /// Standard basis vector `e_index` (0-based).
    pub fn basis(dim: usize, index: usize, ctx: S::Context) -> Result<Self> {
        if index >= dim {
            return Err(AfaError::StateOutOfRange { index, dim });
        }
        let mut entries = vec![S::zero(ctx); dim];
        entries[index] = S::one(ctx);
        Ok(StateVector { entries })
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn context(&self) -> S::Context {
        self.entries[0].context()
    }

    pub fn entry_sum(&self) -> S {
        let mut sum = S::zero(self.context());
        for x in &self.entries {
            sum.add_assign_ref(x);
        }
        sum
    }

    /// `|sum - 1|` as an `f64`, for reporting.
    pub fn sum_deviation(&self) -> f64 {
        let ctx = self.context();
        self.entry_sum().sub(&S::one(ctx)).abs().to_f64()
    }

    pub fn satisfies_sum_invariant(&self) -> bool {
        self.entry_sum().is_one_within_tolerance()
    }

    /// Kronecker product of two state vectors; the result again sums to 1.
    pub fn tensor(&self, other: &StateVector<S>) -> StateVector<S> {
        StateVector {
            entries: tensor_vec(&self.entries, &other.entries),
        }
    }
}

/// Square matrix whose columns all sum to 1.
#[derive(Clone, Debug)]
pub struct AffineOperator<S: Scalar> {
    matrix: Matrix<S>,
    // nonzeros of each column, for products that skip zero state entries
    columns: Vec<Vec<(usize, S)>>,
    // set when built by `tensor`; application then costs nnz(A)*dim(B) +
    // dim(A)*nnz(B) instead of nnz(A)*nnz(B)
    factors: Option<Box<(AffineOperator<S>, AffineOperator<S>)>>,
}

impl<S: Scalar> AffineOperator<S> {
    pub fn new(matrix: Matrix<S>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(AfaError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        for (column, sum) in matrix.column_sums().into_iter().enumerate() {
            if !sum.is_one_within_tolerance() {
                return Err(AfaError::NotAffine {
                    column,
                    sum: sum.to_string(),
                });
            }
        }
        let n = matrix.cols();
        let mut columns = vec![Vec::new(); n];
        for i in 0..n {
            for (j, a) in matrix.row(i).iter().enumerate() {
                if !a.is_zero() {
                    columns[j].push((i, a.clone()));
                }
            }
        }
        Ok(AffineOperator {
            matrix,
            columns,
            factors: None,
        })
    }

    pub fn identity(dim: usize, ctx: S::Context) -> Self {
        Self::new(Matrix::identity(dim, ctx)).expect("identity is affine")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Largest `|column sum - 1|`, recomputed from the stored entries.
    pub fn max_column_deviation(&self) -> f64 {
        let ctx = self.matrix.context();
        self.matrix
            .column_sums()
            .iter()
            .map(|s| s.sub(&S::one(ctx)).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// Operator product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &AffineOperator<S>) -> Result<AffineOperator<S>> {
        AffineOperator::new(self.matrix.mul(&rhs.matrix)?)
    }

    /// Kronecker product `self (x) rhs`; the result remembers its factors.
    pub fn tensor(&self, rhs: &AffineOperator<S>) -> Result<AffineOperator<S>> {
        let mut op = AffineOperator::new(self.matrix.kron(&rhs.matrix))?;
        op.factors = Some(Box::new((self.clone(), rhs.clone())));
        Ok(op)
    }

    /// `out = self * v`, reusing `out`'s allocations. `scratch` is resized
    /// as needed and holds no state between calls.
    pub(crate) fn apply_into(&self, v: &[S], out: &mut [S], scratch: &mut Vec<S>) {
        debug_assert_eq!(v.len(), self.columns.len());
        debug_assert_eq!(out.len(), self.columns.len());
        match &self.factors {
            Some(f) => apply_kron(&f.0, &f.1, v, out, scratch),
            None => apply_sparse(&self.columns, v, out),
        }
    }
}

fn apply_sparse<S: Scalar>(columns: &[Vec<(usize, S)>], v: &[S], out: &mut [S]) {
    for o in out.iter_mut() {
        o.set_zero();
    }
    for (x, column) in v.iter().zip(columns) {
        if x.is_zero() {
            continue;
        }
        for (i, a) in column {
            out[*i].mul_add_assign(a, x);
        }
    }
}

/// `(A (x) B) v` as `A V B^T` with `V` the row-major reshape of `v`.
fn apply_kron<S: Scalar>(
    a: &AffineOperator<S>,
    b: &AffineOperator<S>,
    v: &[S],
    out: &mut [S],
    y: &mut Vec<S>,
) {
    let (na, nb) = (a.dim(), b.dim());
    if y.len() != v.len() {
        y.resize(v.len(), v[0].clone());
    }
    // Y = V B^T, row by row
    for j1 in 0..na {
        let row = &v[j1 * nb..(j1 + 1) * nb];
        let y_row = &mut y[j1 * nb..(j1 + 1) * nb];
        for t in y_row.iter_mut() {
            t.set_zero();
        }
        for (x, column) in row.iter().zip(&b.columns) {
            if x.is_zero() {
                continue;
            }
            for (i2, coef) in column {
                y_row[*i2].mul_add_assign(coef, x);
            }
        }
    }
    // W = A Y
    for o in out.iter_mut() {
        o.set_zero();
    }
    for (j1, column) in a.columns.iter().enumerate() {
        let y_row = &y[j1 * nb..(j1 + 1) * nb];
        for (i1, coef) in column {
            let out_row = &mut out[i1 * nb..(i1 + 1) * nb];
            for (o, x) in out_row.iter_mut().zip(y_row) {
                if !x.is_zero() {
                    o.mul_add_assign(coef, x);
                }
            }
        }
    }
}

/// Sum of absolute values.
pub fn l1_norm<S: Scalar>(v: &StateVector<S>) -> S {
    let mut sum = S::zero(v.context());
    for x in v.entries() {
        sum.add_assign_ref(&x.abs());
    }
    sum
}

pub fn apply<S: Scalar>(op: &AffineOperator<S>, v: &StateVector<S>) -> Result<StateVector<S>> {
    if op.dim() != v.dim() {
        return Err(AfaError::DimensionMismatch {
            expected: op.dim(),
            found: v.dim(),
        });
    }
    let mut out = vec![S::zero(v.context()); v.dim()];
    op.apply_into(v.entries(), &mut out, &mut Vec::new());
    Ok(StateVector::new_unchecked(out))
}

/// Kronecker product of two vectors: `result[i * v.len() + j] = u[i] * v[j]`.
pub fn tensor_vec<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    u.iter()
        .flat_map(|a| v.iter().map(move |b| a.mul(b)))
        .collect()
}

/// Kronecker product of two matrices, ordered consistently with [`tensor_vec`].
pub fn tensor_op<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    a.kron(b)
}

pub fn block_diag<S: Scalar>(blocks: &[Matrix<S>]) -> Result<Matrix<S>> {
    Matrix::block_diag(blocks)
}

/// Embeds a `d x d` linear map into a `(d+1) x (d+1)` affine operator.
///
/// The new last row holds `1 - (column sum)` for every original column, so a
/// vector `(v, s)` with `sum(v) + s = 1` maps to `(M v, 1 - sum(M v))`.
pub fn affinize<S: Scalar>(m: &Matrix<S>) -> Result<AffineOperator<S>> {
    if !m.is_square() {
        return Err(AfaError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let d = m.rows();
    let ctx = m.context();
    let one = S::one(ctx);
    let mut out = Matrix::zeros(d + 1, d + 1, ctx);
    for i in 0..d {
        for j in 0..d {
            out.set(i, j, m.get(i, j).clone());
        }
    }
    for (j, sum) in m.column_sums().iter().enumerate() {
        out.set(d, j, one.sub(sum));
    }
    out.set(d, d, one);
    AffineOperator::new(out)
}

/// Pads the columns of a square matrix to sum 1 by adding `1 - (column sum)`
/// into an existing row, without growing the dimension.
pub fn affinize_into_row<S: Scalar>(
    m: &Matrix<S>,
    balance_row: usize,
) -> Result<AffineOperator<S>> {
    if !m.is_square() {
        return Err(AfaError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if balance_row >= m.rows() {
        return Err(AfaError::StateOutOfRange {
            index: balance_row,
            dim: m.rows(),
        });
    }
    let one = S::one(m.context());
    let mut out = m.clone();
    for (j, sum) in m.column_sums().iter().enumerate() {
        let pad = one.sub(sum);
        out.get_mut(balance_row, j).add_assign_ref(&pad);
    }
    AffineOperator::new(out)
}

/// Probability of observing a state in `accepting`: `sum |v[j]| / |v|_1`.
pub fn weighting<S: Scalar>(v: &StateVector<S>, accepting: &BTreeSet<usize>) -> Result<S> {
    let norm = l1_norm(v);
    let mut mass = S::zero(v.context());
    for &j in accepting {
        let x = v.entries().get(j).ok_or(AfaError::StateOutOfRange {
            index: j,
            dim: v.dim(),
        })?;
        mass.add_assign_ref(&x.abs());
    }
    mass.checked_div(&norm).ok_or(AfaError::ZeroNorm)
}

#[cfg(test)]
mod tests {
    use rug::{Float, Rational};

    use super::*;
    use crate::scalar::{ExactCtx, Real};

    fn q(x: i64) -> Rational {
        Rational::from(x)
    }

    fn sv(xs: &[i64]) -> StateVector<Rational> {
        StateVector::new(xs.iter().map(|&x| q(x)).collect()).unwrap()
    }

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_i64_rows(rows, ExactCtx).unwrap()
    }

    #[test]
    fn l1_norm_examples() {
        assert_eq!(l1_norm(&sv(&[1, 0, 0])), q(1));
        assert_eq!(l1_norm(&sv(&[1, 50, -50])), q(101));
        assert_eq!(l1_norm(&sv(&[1, 3, -3])), q(7));
    }

    #[test]
    fn state_vector_rejects_bad_sum() {
        assert!(StateVector::new(vec![q(1), q(1)]).is_err());
        assert!(StateVector::<Rational>::new(vec![]).is_err());
        assert!(StateVector::<Rational>::basis(3, 3, ExactCtx).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = AffineOperator::identity(2, ExactCtx);
        assert_eq!(apply(&id, &sv(&[1, 0])).unwrap(), sv(&[1, 0]));

        let op = affinize(&m(&[&[1, 0], &[1, 1]])).unwrap();
        assert_eq!(apply(&op, &sv(&[1, 0, 0])).unwrap(), sv(&[1, 1, -1]));

        // shear on (1, 2): not itself a state vector, so use the matrix directly
        let shear = m(&[&[1, 0], &[5, 1]]);
        assert_eq!(shear.mul_vec(&[q(1), q(2)]).unwrap(), vec![q(1), q(7)]);

        assert!(matches!(
            apply(&id, &sv(&[1, 0, 0])),
            Err(AfaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_affine_matrix_rejected() {
        assert!(matches!(
            AffineOperator::new(m(&[&[1, 0], &[1, 1]])),
            Err(AfaError::NotAffine { column: 0, .. })
        ));
        assert!(AffineOperator::new(m(&[&[1, 0, 0], &[0, 1, 0]])).is_err());
    }

    #[test]
    fn tensor_vec_examples() {
        assert_eq!(
            tensor_vec(&[q(1), q(0)], &[q(1), q(0)]),
            vec![q(1), q(0), q(0), q(0)]
        );
        assert_eq!(
            tensor_vec(&[q(1), q(3)], &[q(1), q(3)]),
            vec![q(1), q(3), q(3), q(9)]
        );
        let alpha = Float::with_val(128, 0);
        let (c, s) = (Real::cos(&alpha), Real::sin(&alpha));
        let t = tensor_vec(&[c.clone(), s.clone()], &[c, s]);
        let got: Vec<f64> = t.iter().map(|x| x.to_f64()).collect();
        assert_eq!(got, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_op_examples() {
        let id2 = Matrix::<Rational>::identity(2, ExactCtx);
        assert_eq!(tensor_op(&id2, &id2), Matrix::identity(4, ExactCtx));
        let shear = m(&[&[1, 0], &[1, 1]]);
        let k = tensor_op(&shear, &shear);
        let u = tensor_vec(&[q(1), q(0)], &[q(1), q(0)]);
        assert_eq!(k.mul_vec(&u).unwrap(), vec![q(1), q(1), q(1), q(1)]);
    }

    #[test]
    fn block_diag_examples() {
        let d =
            block_diag::<Rational>(&[Matrix::identity(2, ExactCtx), Matrix::identity(3, ExactCtx)])
                .unwrap();
        assert_eq!(d, Matrix::identity(5, ExactCtx));
        let d = block_diag(&[m(&[&[0]]), m(&[&[2]])]).unwrap();
        assert_eq!(d.mul_vec(&[q(1), q(1)]).unwrap(), vec![q(0), q(2)]);
        let d = block_diag(&[m(&[&[1, 0], &[1, 1]]), m(&[&[1, 0], &[0, 2]])]).unwrap();
        assert_eq!(
            d.mul_vec(&[q(1), q(0), q(1), q(1)]).unwrap(),
            vec![q(1), q(1), q(1), q(2)]
        );
    }

    #[test]
    fn affinize_examples() {
        let a = affinize(&m(&[&[1, 0], &[1, 1]])).unwrap();
        assert_eq!(a.matrix(), &m(&[&[1, 0, 0], &[1, 1, 0], &[-1, 0, 1]]));
        let a = affinize(&Matrix::<Rational>::identity(3, ExactCtx)).unwrap();
        assert_eq!(a.matrix(), &Matrix::identity(4, ExactCtx));
        let a = affinize(&m(&[&[0]])).unwrap();
        assert_eq!(a.matrix(), &m(&[&[0, 0], &[1, 1]]));
    }

    #[test]
    fn affinize_into_existing_row() {
        // routes entry 0 to 1 and drops entry 2; padding lands in row 2
        let a = affinize_into_row(&m(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]), 2).unwrap();
        assert_eq!(a.matrix(), &m(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 1]]));
        assert!(affinize_into_row(&m(&[&[1]]), 1).is_err());
    }

    #[test]
    fn weighting_examples() {
        let acc: BTreeSet<usize> = [0].into();
        assert_eq!(weighting(&sv(&[1, 0, 0]), &acc).unwrap(), q(1));
        assert_eq!(
            weighting(&sv(&[1, 50, -50]), &acc).unwrap(),
            Rational::from((1, 101))
        );
        let v = StateVector::new(vec![
            Rational::from((98746, 100000)),
            Rational::from((1254, 100000)),
            q(0),
            q(0),
            q(0),
        ])
        .unwrap();
        assert_eq!(
            weighting(&v, &acc).unwrap(),
            Rational::from((98746, 100000))
        );
    }

    #[test]
    fn weighting_guards_zero_norm() {
        let zero = StateVector::new_unchecked(vec![q(0), q(0)]);
        assert!(matches!(
            weighting(&zero, &[0].into()),
            Err(AfaError::ZeroNorm)
        ));
    }
}
