use std::process::ExitCode;

fn main() -> ExitCode {
    qzeta::cli::run()
}
