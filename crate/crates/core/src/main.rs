use std::process::ExitCode;

fn main() -> ExitCode {
    match scitrade::cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(scitrade::cli::exit_code(&e) as u8)
        }
    }
}
