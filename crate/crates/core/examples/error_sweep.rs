//! Rejection probability of `a^8` as `k` grows: exactly `2k/(2k+1)`.

use afa::powereq::{blocks, build_powereq};
use afa::Result;
use rug::Rational;

fn main() -> Result<()> {
    let d = blocks("aaaaaaaa")?;
    println!("k\treject\tdecimal");
    for k in [2, 5, 10, 25, 50, 100, 1000] {
        let p = build_powereq(k)?.run_blocks(&d)?.accept_probability;
        let reject = Rational::from(1) - p;
        assert_eq!(reject, Rational::from((2 * k, 2 * k + 1)));
        println!("{k}\t{reject}\t{:.6}", reject.to_f64());
    }
    Ok(())
}
