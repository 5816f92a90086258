use clap::Parser;

use dsplit::cli::{run, Cli};

fn main() {
    // Usage errors exit with clap's status 2; experiment failures (bad
    // configs, underflowing adaptive runs, missing files) exit 1. Recorded
    // instability inside a sweep is data, not an error, and exits 0.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
