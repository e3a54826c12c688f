//! `estimkit` command line: volatility and density estimation over CSV data.

use clap::Parser;

use estimkit_cli::{args, commands};

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("{}", e.to_json_line());
        std::process::exit(e.exit_code());
    }
}
