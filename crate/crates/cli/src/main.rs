use std::process::ExitCode;

fn main() -> ExitCode {
    match cantordiff_cli::execute(std::env::args_os()) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(cantordiff_cli::EXIT_ERROR as u8)
        }
    }
}
