use std::process::ExitCode;

fn main() -> ExitCode {
    multig_rank::cli::run(std::env::args_os())
}
