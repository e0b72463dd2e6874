use clap::Parser;

use splatsim_cli::args::{Cli, Command};
use splatsim_cli::{bench, commands, with_threads, CliError, CliResult};

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> CliResult<()> {
    let seed = cli.seed;
    with_threads(cli.threads, move || -> CliResult<()> {
        match &cli.command {
            Command::Render(a) => print_json(&commands::render(a)?),
            Command::Lidar(a) => print_json(&commands::lidar(a)?),
            Command::Convert(a) => print_json(&commands::convert(a)?),
            Command::Augment(a) => {
                let m = commands::augment(a, seed)?;
                println!("augmented {} frames into {}", m.frames.len(), a.out.display());
            }
            Command::Bench(a) => {
                let report = bench::run(a, seed.unwrap_or(0))?;
                print!("{}", report.table());
                if let Some(p) = &a.report {
                    let text = serde_json::to_string_pretty(&report).expect("serializable");
                    std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
                }
            }
        }
        Ok(())
    })?
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).init();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
