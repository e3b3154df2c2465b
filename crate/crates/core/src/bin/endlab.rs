use clap::Parser;
use endlab::cli::{run, Cli};

fn main() -> std::process::ExitCode {
    run(Cli::parse())
}
