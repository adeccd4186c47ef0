use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("NLQ_LOG", "warn")).init();
    let cli = nlq_cli::Cli::parse();
    let stdout = std::io::stdout();
    match nlq_cli::run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(nlq_cli::exit_code(&e) as u8)
        }
    }
}
