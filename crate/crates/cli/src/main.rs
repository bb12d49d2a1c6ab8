mod args;
mod commands;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use args::{Cli, Format};

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("RELIM_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors and 0 for --help / --version
            e.exit();
        }
    };
    let code = match commands::run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Human => print!("{}", report.human),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("report serializes")),
            }
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{}", commands::render_error(&e, cli.format));
            e.exit_code()
        }
    };
    std::process::exit(code);
}
