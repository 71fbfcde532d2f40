//! Gadgets, affinization, tensor products and the weighting operator.

use std::collections::BTreeSet;

use afa::gadgets::{count_by, shear_add};
use afa::scalar::ExactCtx;
use afa::{affinize, apply, weighting, Result, StateVector};
use rug::Rational;

fn main() -> Result<()> {
    // count_by(8, 0->1) adds 8 to entry 1 per step while entry 0 holds 1
    let counter = count_by::<Rational>(8, 0, 1, ExactCtx)?;
    let op = affinize(counter.matrix())?;
    println!("{} affinized to {}x{}", counter.label(), op.dim(), op.dim());

    let mut v = StateVector::basis(op.dim(), 0, ExactCtx)?;
    for _ in 0..7 {
        v = apply(&op, &v)?;
    }
    println!("after 7 steps: {:?}", v.entries());
    println!("entry sum: {}", v.entry_sum());

    // two machines side by side in one state vector
    let shear = affinize(shear_add::<Rational>(-7, ExactCtx).matrix())?;
    let both = op.tensor(&shear)?;
    let start = StateVector::basis(op.dim(), 0, ExactCtx)?.tensor(&StateVector::basis(
        shear.dim(),
        0,
        ExactCtx,
    )?);
    let end = apply(&both, &start)?;
    println!(
        "tensor product: {} states, sum {}",
        both.dim(),
        end.entry_sum()
    );

    let accepting: BTreeSet<usize> = [0].into();
    println!("weighting of state 0: {}", weighting(&v, &accepting)?);
    Ok(())
}
