use std::collections::BTreeSet;

use afa::gadgets::{count_by, rotation, shear_add};
use afa::scalar::ExactCtx;
use afa::{affinize, apply, tensor_op, tensor_vec, weighting, AffineOperator, Matrix, StateVector};
use proptest::prelude::*;
use rug::{Float, Rational};

fn small_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_dim).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-8i64..=8, d), d))
}

fn exact(rows: &[Vec<i64>]) -> Matrix<Rational> {
    Matrix::from_i64_rows(rows, ExactCtx).unwrap()
}

/// A state vector: arbitrary entries, the last one balancing the sum to 1.
fn state(len: usize) -> impl Strategy<Value = StateVector<Rational>> {
    prop::collection::vec(-20i64..=20, len - 1).prop_map(|xs| {
        let mut v: Vec<Rational> = xs.iter().map(|&x| Rational::from(x)).collect();
        let sum: i64 = xs.iter().sum();
        v.push(Rational::from(1 - sum));
        StateVector::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn affinize_balances_columns(rows in small_matrix(6)) {
        let m = exact(&rows);
        let a = affinize(&m).unwrap();
        let d = rows.len();
        prop_assert_eq!(a.dim(), d + 1);
        prop_assert!(a.matrix().column_sums().iter().all(|s| *s == 1));
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(a.matrix().get(i, j), m.get(i, j));
            }
            prop_assert_eq!(a.matrix().get(i, d), &Rational::new());
        }
        prop_assert_eq!(a.matrix().get(d, d), &Rational::from(1));
    }

    #[test]
    fn affine_operators_keep_the_sum(
        (rows, v) in small_matrix(4).prop_flat_map(|rows| {
            let n = rows.len() + 1;
            (Just(rows), state(n))
        })
    ) {
        let a = affinize(&exact(&rows)).unwrap();
        let w = apply(&a, &v).unwrap();
        prop_assert_eq!(w.entry_sum(), 1);
    }

    #[test]
    fn tensor_of_products(
        a in small_matrix(3),
        b in small_matrix(3),
        u in prop::collection::vec(-9i64..=9, 3),
        v in prop::collection::vec(-9i64..=9, 3),
    ) {
        let (a, b) = (exact(&a), exact(&b));
        let u: Vec<Rational> = u[..a.cols()].iter().map(|&x| Rational::from(x)).collect();
        let v: Vec<Rational> = v[..b.cols()].iter().map(|&x| Rational::from(x)).collect();
        let lhs = tensor_op(&a, &b).mul_vec(&tensor_vec(&u, &v)).unwrap();
        let rhs = tensor_vec(&a.mul_vec(&u).unwrap(), &b.mul_vec(&v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_of_affine_is_affine(a in small_matrix(3), b in small_matrix(3)) {
        let a = affinize(&exact(&a)).unwrap();
        let b = affinize(&exact(&b)).unwrap();
        let t = a.tensor(&b).unwrap();
        prop_assert_eq!(t.dim(), a.dim() * b.dim());
        prop_assert_eq!(t.max_column_deviation(), 0.0);
        prop_assert_eq!(t.matrix(), &tensor_op(a.matrix(), b.matrix()));
    }

    #[test]
    fn tensored_application_matches_dense(a in small_matrix(3), b in small_matrix(4), x in state(20)) {
        let a = affinize(&exact(&a)).unwrap();
        let b = affinize(&exact(&b)).unwrap();
        let t = a.tensor(&b).unwrap();
        let n = t.dim();
        let entries: Vec<Rational> = x.entries()[..n - 1].to_vec();
        let sum: Rational = entries.iter().fold(Rational::new(), |acc, e| acc + e);
        let mut entries = entries;
        entries.push(1 - sum);
        let v = StateVector::new(entries).unwrap();
        let dense = AffineOperator::new(t.matrix().clone()).unwrap();
        prop_assert_eq!(apply(&t, &v).unwrap(), apply(&dense, &v).unwrap());
    }

    #[test]
    fn shear_powers(d in -8i64..=8, m in 0u32..=16) {
        let g = shear_add::<Rational>(d, ExactCtx);
        let p = g.matrix().pow(m).unwrap();
        let expected = shear_add::<Rational>(d * i64::from(m), ExactCtx);
        prop_assert_eq!(&p, expected.matrix());
    }

    #[test]
    fn count_by_powers(k in -8i64..=8, m in 0u32..=16, src in 0usize..3, off in 1usize..3) {
        let dst = (src + off) % 3;
        let g = count_by::<Rational>(k, src, dst, ExactCtx).unwrap();
        let p = g.matrix().pow(m).unwrap();
        let expected = count_by::<Rational>(k * i64::from(m), src, dst, ExactCtx).unwrap();
        prop_assert_eq!(&p, expected.matrix());
    }

    #[test]
    fn weighting_complements(v in state(6), accepting in prop::collection::btree_set(0usize..6, 0..=6)) {
        let rest: BTreeSet<usize> = (0..6).filter(|j| !accepting.contains(j)).collect();
        let p = weighting(&v, &accepting).unwrap();
        let q = weighting(&v, &rest).unwrap();
        prop_assert!(p >= 0);
        prop_assert!(p <= 1);
        prop_assert_eq!(p + q, 1);
    }

    #[test]
    fn rotations_compose(a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let prec = 128;
        let (fa, fb) = (Float::with_val(prec, a), Float::with_val(prec, b));
        let ra = rotation(&fa).into_matrix();
        let rb = rotation(&fb).into_matrix();
        let sum = Float::with_val(prec, &fa + &fb);
        let rab = rotation(&sum).into_matrix();
        let product = ra.mul(&rb).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let d = Float::with_val(prec, product.get(i, j) - rab.get(i, j));
                prop_assert!(d.abs().to_f64() < 1e-35);
            }
        }
        let det = Float::with_val(prec, ra.get(0, 0) * ra.get(1, 1)) - Float::with_val(prec, ra.get(0, 1) * ra.get(1, 0));
        prop_assert!((det.to_f64() - 1.0).abs() < 1e-30);
        let affine = affinize(&tensor_op(&ra, &ra)).unwrap();
        prop_assert!(affine.max_column_deviation() < 1e-35);
    }
}
