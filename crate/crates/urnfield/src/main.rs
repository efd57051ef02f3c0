use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(urnfield::cli::run(std::env::args().collect()))
}
