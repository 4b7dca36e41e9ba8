mod args;
mod commands;
mod output;

use args::{Cli, Command, Common};
use besselforge::sampling::write_samples_csv;
use besselforge::Error;
use clap::Parser;
use output::{emit, Report};
use std::io::Write;
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_CLAIM: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Usage(_) | Error::NotInImage(_) | Error::Construction { .. } => EXIT_DOMAIN,
        Error::Numerical(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::KernelEval(a) => &a.common,
        Command::Converge(a) => &a.common,
        Command::Tails(a) => &a.common,
        Command::Sample(a) => &a.common,
        Command::Hellinger(a) => &a.common,
        Command::Orbital(a) => &a.common,
    }
}

fn run(cmd: &Command) -> Result<Report, Error> {
    match cmd {
        Command::KernelEval(a) => commands::kernel_eval(a),
        Command::Converge(a) => commands::converge(a),
        Command::Tails(a) => commands::tails(a),
        Command::Hellinger(a) => commands::hellinger(a),
        Command::Orbital(a) => commands::orbital(a),
        Command::Sample(a) => {
            let (report, configs) = commands::sample(a)?;
            if let Some(path) = &a.points_out {
                let mut out = output::open(Some(path))?;
                write_samples_csv(&configs, &mut out)?;
                out.flush()?;
            }
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = common(&cli.command);
    if let Some(t) = c.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_DOMAIN);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&report, c.format, c.out.as_deref()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    match report.failed_claim {
        Some(msg) => {
            eprintln!("claim failed: {msg}");
            if c.format == args::Format::Csv {
                // the table also goes to stderr so a CI log shows it
                let _ = report.table.write(std::io::stderr().lock());
            }
            ExitCode::from(EXIT_CLAIM)
        }
        None => ExitCode::SUCCESS,
    }
}
