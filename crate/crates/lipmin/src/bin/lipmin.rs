use clap::Parser;
use lipmin::cli::{run, Cli};
use lipmin::Error;

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        // bad arguments are usage errors (2, matching clap); everything else
        // is a runtime failure (1)
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
