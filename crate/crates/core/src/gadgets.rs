//! Linear building blocks. None of these is affine on its own; callers
//! compose them and pass the result through [`affinize`](crate::affine::affinize).

use crate::error::{AfaError, Result};
use crate::matrix::Matrix;
use crate::scalar::{Real, Scalar};

/// A small square matrix with a human-readable label.
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget<S: Scalar> {
    matrix: Matrix<S>,
    label: String,
}

impl<S: Scalar> Gadget<S> {
    fn new(matrix: Matrix<S>, label: String) -> Self {
        Gadget { matrix, label }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `[[1, 0], [d, 1]]`: maps `(1, a)` to `(1, a + d)`.
pub fn shear_add<S: Scalar>(d: i64, ctx: S::Context) -> Gadget<S> {
    let m = Matrix::from_i64_rows(&[[1, 0], [d, 1]], ctx).expect("2x2 literal");
    Gadget::new(m, format!("shear_add({d})"))
}

/// 3x3 counter: identity plus `k` at `(dst, src)`. With `v[src] == 1`, each
/// application adds `k` to `v[dst]`. Indices are 0-based.
pub fn count_by<S: Scalar>(k: i64, src: usize, dst: usize, ctx: S::Context) -> Result<Gadget<S>> {
    if src == dst {
        return Err(AfaError::InvalidParameter(format!(
            "count_by: source and target entry are both {src}"
        )));
    }
    if src >= 3 || dst >= 3 {
        return Err(AfaError::StateOutOfRange {
            index: src.max(dst),
            dim: 3,
        });
    }
    let mut m = Matrix::identity(3, ctx);
    m.set(dst, src, S::from_i64(k, ctx));
    Ok(Gadget::new(m, format!("count_by({k}, {src}->{dst})")))
}

/// `[[1, -1], [0, 1]]`: maps `(a, b)` to `(a - b, b)`.
pub fn subtract_pair<S: Scalar>(ctx: S::Context) -> Gadget<S> {
    let m = Matrix::from_i64_rows(&[[1, -1], [0, 1]], ctx).expect("2x2 literal");
    Gadget::new(m, "subtract_pair".into())
}

/// `[[1, 0], [0, c]]`: maps `(a, b)` to `(a, b * c)`.
pub fn scale_entry<S: Scalar>(c: S) -> Gadget<S> {
    let ctx = c.context();
    let label = format!("scale_entry({c})");
    let m = Matrix::from_rows(vec![vec![S::one(ctx), S::zero(ctx)], vec![S::zero(ctx), c]])
        .expect("2x2 literal");
    Gadget::new(m, label)
}

/// Counter-clockwise rotation by `theta` radians.
pub fn rotation<S: Real>(theta: &S) -> Gadget<S> {
    let (c, s) = (theta.cos(), theta.sin());
    let m = Matrix::from_rows(vec![vec![c.clone(), s.neg()], vec![s, c]]).expect("2x2 literal");
    Gadget::new(m, format!("rotation({})", theta.to_f64()))
}
