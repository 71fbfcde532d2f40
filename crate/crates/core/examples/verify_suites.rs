//! The verification suites behind `afa verify`, on small budgets.

use afa::cli::verify::{
    verify_combined, verify_invariants, verify_powereq, CombinedBudget, InvariantBudget,
    PowerEqBudget,
};
use afa::Result;

fn main() -> Result<()> {
    let mut sink = std::io::sink();
    let powereq = verify_powereq(
        &PowerEqBudget {
            exhaustive_len: 8,
            random: 20,
            ..Default::default()
        },
        &mut sink,
    )?;
    let combined = verify_combined(
        &CombinedBudget {
            oracles: 4,
            n_max: 2,
            ..Default::default()
        },
        &mut sink,
    )?;
    let invariants = verify_invariants(
        &InvariantBudget {
            n_max: 1,
            oracles: 1,
            ..Default::default()
        },
        &mut sink,
    )?;
    for s in [powereq, combined, invariants] {
        println!("{s}");
    }
    Ok(())
}
