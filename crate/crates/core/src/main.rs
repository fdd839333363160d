use std::process::ExitCode;

fn main() -> ExitCode {
    rtcompare::cli::main()
}
