mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use mcfin::witness::ReportOptions;

use args::{Cli, Command};
use commands::{CrosscheckArgs, Failure, ReportArgs};
use output::Out;

fn run(cli: Cli) -> commands::CmdResult {
    let out = Out::new(cli.format, cli.timestamps);
    match &cli.command {
        Command::Gen { spec, n, n_max } => commands::gen(&out, spec, *n, *n_max),
        Command::Residues { spec, modulus, n_max } => commands::residues(&out, spec, *modulus, *n_max),
        Command::Period { spec, search } => commands::period(&out, spec, search),
        Command::Recur { spec, search } => commands::recur(&out, spec, search),
        Command::Cfinite { spec, n_max, max_order } => commands::cfinite(&out, spec, *n_max, *max_order),
        Command::Oracle(cmd) => commands::oracle(&out, cmd),
        Command::Crosscheck {
            a,
            all,
            fixtures,
            online,
            cache_dir,
            generator,
            offset,
            count,
        } => commands::crosscheck_cmd(
            &out,
            CrosscheckArgs {
                a: a.as_deref(),
                all: *all,
                fixtures: fixtures.clone(),
                online: *online,
                cache_dir: cache_dir.clone(),
                generator: generator.as_deref(),
                offset: *offset,
                count: *count,
            },
        ),
        Command::Cex(cmd) => commands::cex(&out, cmd),
        Command::Prs(cmd) => commands::prs(&out, cmd),
        Command::Report {
            spec,
            moduli,
            n_max,
            max_order,
            min_margin,
            cfinite_order,
            exact_n_max,
        } => commands::report(
            &out,
            ReportArgs {
                spec,
                moduli,
                n_max: *n_max,
                opts: ReportOptions {
                    max_order: *max_order,
                    min_margin: *min_margin,
                    cfinite_max_order: *cfinite_order,
                    exact_n_max: *exact_n_max,
                },
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg) | Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
