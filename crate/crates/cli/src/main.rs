use clap::Parser;

use chiral_cli::args::Cli;
use chiral_cli::error::{CliError, CliResult};

fn setup_threads() -> CliResult<()> {
    if let Some(n) = chiral_cli::thread_count()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let code = match setup_threads().and_then(|()| chiral_cli::run(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code as i32);
}
