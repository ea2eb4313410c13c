use clap::Parser;

use ghp_cli::cli::{main_with, Cli, EXIT_INPUT};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    std::process::exit(main_with(cli));
}
