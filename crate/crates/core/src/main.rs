use clap::Parser;
use retfields::cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(cli, &mut std::io::stdout()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}
