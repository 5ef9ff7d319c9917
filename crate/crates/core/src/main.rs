use std::io;
use std::process::ExitCode;

use dephasim::io_cli::{run, TOLERANCE_ENV};

fn main() -> ExitCode {
    let tolerance = std::env::var(TOLERANCE_ENV).ok();
    let code = run(
        std::env::args_os(),
        tolerance,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
