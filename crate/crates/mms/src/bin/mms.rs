use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mms::cli::main(std::env::args().skip(1)) as u8)
}
