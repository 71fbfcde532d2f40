//! Encoding a unary language as an angle and reading membership back off
//! the analysis angles.

use afa::encoding::{phi, theta, LanguageOracle, DECISION_BOUND};
use afa::{Real, Result};

fn main() -> Result<()> {
    let oracle = LanguageOracle::from_bit_str("1101001000")?;
    let t = theta(&oracle, 10, 128)?;
    println!("theta with {} terms: {}", t.terms(), t.value().to_f64());
    println!("truncation bound: {:e}", t.truncation_bound());

    for j in 0..6 {
        let angle = phi(&oracle, j, 10, 128)?;
        let s2 = Real::sin(&angle).square().to_f64();
        let member = oracle.is_member(j)?;
        let margin = if member { s2 } else { 1.0 - s2 };
        println!("j={j} member={member} sin^2(phi)={s2:.6} margin={margin:.6}");
        assert!(margin >= DECISION_BOUND);
    }
    Ok(())
}
