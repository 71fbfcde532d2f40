use std::process::ExitCode;

fn main() -> ExitCode {
    afa::cli::main()
}
