use std::process::ExitCode;

fn main() -> ExitCode {
    blockmatch::cli::cli_main(std::env::args_os())
}
