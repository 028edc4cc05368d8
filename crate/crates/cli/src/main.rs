use clap::Parser;
use hypermon_cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
