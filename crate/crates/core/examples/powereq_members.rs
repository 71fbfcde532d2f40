//! The PowerEQ recognizer on members and controlled non-members.

use afa::powereq::{build_powereq, member_blocks, Mutation};
use afa::Result;

fn main() -> Result<()> {
    let m = build_powereq(25)?;
    println!(
        "{} states, error bound {}",
        m.machine().dim(),
        m.error_bound()
    );

    for n in 0..=3 {
        let d = member_blocks(n)?;
        let p = m.run_blocks(&d)?.accept_probability;
        println!("member n={n} ({} symbols): accept {p}", d.len());
    }

    let member = member_blocks(2)?;
    for mutation in [
        Mutation::AddA { block: 2, count: 1 },
        Mutation::RemoveA { block: 0, count: 1 },
        Mutation::SplitBlock { block: 1, at: 20 },
        Mutation::JoinBlocks { block: 0 },
    ] {
        let d = member.mutate(mutation)?;
        let p = m.run_blocks(&d)?.accept_probability;
        println!("{d}: T = {}, accept {p}", d.t_sum());
    }
    Ok(())
}
