use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use stpart_cli::{render, run, Cli, Config};

fn load_config(cli: &Cli) -> Result<Config, String> {
    match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {}", p.display(), e))?;
            Config::from_toml(&text)
        }
        None => Ok(Config::default()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    let t0 = Instant::now();
    let mut out = match run(&cli, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    if cli.timing {
        out.report.timing = Some(t0.elapsed().as_secs_f64());
    }
    let doc = match render(&cli, &out) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, doc) {
                eprintln!("error: {}: {}", p.display(), e);
                return ExitCode::from(1);
            }
        }
        None => print!("{}", doc),
    }
    ExitCode::from(out.report.exit_code() as u8)
}
