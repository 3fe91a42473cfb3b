use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use annoglue_core::env::SystemEnvironment;

fn main() -> ExitCode {
    let dir = match std::env::var_os("ANNOGLUE_PROJECT") {
        Some(dir) => PathBuf::from(dir),
        None => match std::env::current_dir() {
            Ok(dir) => dir,
            Err(e) => {
                eprintln!("error: cannot determine the current directory: {e}");
                return ExitCode::from(3);
            }
        },
    };
    let outcome = annoglue_cli::run(std::env::args_os(), &dir, &mut SystemEnvironment);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
