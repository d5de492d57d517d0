use clap::error::ErrorKind;
use clap::Parser;
use rubber_cli::{exit, run_cli, Cli, Outcome};
use serde_json::Value;

fn main() {
    let outcome = match Cli::try_parse() {
        Ok(cli) => run_cli(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(exit::OK);
        }
        Err(e) => Outcome::error("", Value::Null, exit::INVALID_INPUT, "invalid_input", e.to_string().trim()),
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", outcome.stdout);
    std::process::exit(outcome.code);
}
