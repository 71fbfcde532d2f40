//! Run-length input notation and the JSON run report.

use afa::cli::shorthand::{parse, render};
use afa::cli::{run_powereq, RunLength};
use afa::Result;

fn main() -> Result<()> {
    let x = parse("a^7 b a^56 b a^448")?;
    println!("{} symbols in {} runs", x.len(), x.runs().len());
    println!("rendered back: {x}");
    println!("render(\"aaab\") = {}", render("aaab")?);

    let report = run_powereq(25, &x)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );

    let near = RunLength::parse("a^7 b a^57")?;
    let report = run_powereq(25, &near)?;
    println!(
        "{near}: {:?} with probability {}",
        report.decision, report.accept_probability.decimal
    );
    Ok(())
}
