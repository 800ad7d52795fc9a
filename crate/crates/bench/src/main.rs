use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use blocksym_bench::{run_benchmark, Cli, Command, OutputFormat, RunReport};
use clap::Parser;

fn write_report<W: Write>(
    report: &RunReport,
    format: OutputFormat,
    mut w: W,
) -> Result<(), Box<dyn std::error::Error>> {
    match format {
        OutputFormat::Csv => report.write_csv(&mut w)?,
        OutputFormat::Md => report.write_markdown(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let Cli {
        command: Command::Solve(args),
    } = Cli::parse();
    let run = match run_benchmark(&args) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = if args.out == "stdout" {
        write_report(&run.report, args.format, io::stdout().lock())
    } else {
        File::create(&args.out)
            .map_err(Into::into)
            .and_then(|f| write_report(&run.report, args.format, BufWriter::new(f)))
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report to {}: {e}", args.out);
        return ExitCode::from(2);
    }
    for res in &run.results {
        if let Some(bd) = &res.breakdown {
            eprintln!(
                "{}: {:?} Gram system singular at iteration {} (pivot {}, |u| = {:.3e})",
                res.solver, bd.system, bd.iteration, bd.pivot_index, bd.pivot_magnitude
            );
        }
    }
    if run.report.all_converged() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
