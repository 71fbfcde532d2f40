//! PowerEQ tensored with the rotation machine: accepts the members of
//! PowerEQ whose index is in the oracle's language.

use afa::encoding::{build_combined, LanguageOracle};
use afa::powereq::member_blocks;
use afa::Result;

fn main() -> Result<()> {
    let m = build_combined(LanguageOracle::even_lengths(), 25, 2, 4)?;
    println!(
        "{} states, {} bits, angle with {} terms",
        m.machine().dim(),
        m.precision(),
        m.angle().terms()
    );
    for n in 0..=2 {
        let d = member_blocks(n)?;
        let p = m.run_blocks(&d)?.accept_probability;
        let predicted = m.predicted(&d);
        println!(
            "n={n} in L: {}  accept {:.9}  predicted {:.9}",
            m.oracle().is_member(n.into())?,
            p.to_f64(),
            predicted.to_f64()
        );
    }
    let p = m.run("aaaaaaaa")?.accept_probability;
    println!("a^8 (not in PowerEQ): accept {:.9}", p.to_f64());
    Ok(())
}
