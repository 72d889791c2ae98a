use std::process::ExitCode;

fn main() -> ExitCode {
    apimap::cli::run(std::env::args_os())
}
