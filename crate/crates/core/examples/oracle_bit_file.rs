//! Loading a language from a bit file: one line of '0'/'1', character i
//! is the membership of a^i.

use afa::encoding::{build_combined, BeyondEnd, LanguageOracle};
use afa::powereq::member_blocks;
use afa::Result;

fn main() -> Result<()> {
    let path = std::env::temp_dir().join("afa-example.bits");
    std::fs::write(&path, "0110\n").expect("temp dir is writable");

    let oracle = LanguageOracle::from_spec(path.to_str().expect("utf-8 temp path"))?;
    println!("{oracle}: bit 5 defaults to {}", oracle.is_member(5)?);
    let strict = oracle.clone().with_beyond_end(BeyondEnd::Error);
    println!(
        "strict lookup of bit 5: {:?}",
        strict.is_member(5).map_err(|e| e.to_string())
    );

    let m = build_combined(oracle, 25, 3, 4)?;
    for n in 0..=3 {
        let p = m.run_blocks(&member_blocks(n)?)?.accept_probability;
        println!("member n={n}: accept {:.6}", p.to_f64());
    }
    std::fs::remove_file(path).ok();
    Ok(())
}
