use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var(cone_lab::cli::SEED_ENV).ok();
    let code = cone_lab::cli::run(std::env::args_os(), seed.as_deref(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
