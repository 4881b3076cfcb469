use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wfav::pipeline::{cmd_check, cmd_export, cmd_map, cmd_verify, Flags, Format, RunReport};
use wfav::properties::CheckOptions;

#[derive(Parser)]
#[command(name = "wfav", version, about = "Verify goal models and their workflow nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Token bound per place during state-space exploration.
    #[arg(long, default_value_t = 1, global = true)]
    bound: u32,
    #[arg(long, value_enum, default_value_t = OutFormat::Text, global = true)]
    format: OutFormat,
    /// Write the Datalog facts of the model to this file.
    #[arg(long, value_name = "PATH", global = true)]
    emit_facts: Option<PathBuf>,
    /// Report unchecked optional reads as violations instead of warnings.
    #[arg(long, global = true)]
    strict_optional_reads: bool,
    /// Output file.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline on a goal model.
    Check { model: PathBuf },
    /// Map a goal model to a net; with -o the trace is written beside it.
    Map { model: PathBuf },
    /// Check a net against the goal model it implements.
    Verify {
        model: PathBuf,
        net: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// DOT export of a net or its reachability graph.
    Export {
        net: PathBuf,
        #[arg(long)]
        reachability: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;
    let mut flags = Flags {
        check: CheckOptions { bound: c.bound, strict_optional_reads: c.strict_optional_reads },
        format: match c.format {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
        },
        emit_facts: c.emit_facts,
        trace: None,
        output: c.output,
        color: std::env::var("WFAV_COLOR").is_ok_and(|v| v == "1"),
    };
    let result = match cli.command {
        Command::Check { model } => cmd_check(&model, &flags).map(|r| (r, None)),
        Command::Map { model } => cmd_map(&model, &flags),
        Command::Verify { model, net, trace } => {
            flags.trace = trace;
            cmd_verify(&model, &net, &flags).map(|r| (r, None))
        }
        Command::Export { net, reachability } => cmd_export(&net, reachability, &flags),
    };
    match result {
        Ok((report, payload)) => emit(&report, payload, &flags),
        Err(e) => {
            eprintln!("wfav: {e}");
            ExitCode::from(2)
        }
    }
}

/// A payload (net or DOT text) goes to stdout and the report to stderr;
/// otherwise the report is the output.
fn emit(report: &RunReport, payload: Option<String>, flags: &Flags) -> ExitCode {
    match payload {
        Some(p) => {
            print!("{p}");
            if report.exit_code != 0 {
                eprint!("{}", report.render(flags));
            }
        }
        None => print!("{}", report.render(flags)),
    }
    ExitCode::from(report.exit_code as u8)
}
