//! `imagelab`: validate and run pipeline documents, and browse the operator
//! catalog, without the service.

mod describe;
mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Outcome classes and their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    UsageOrIo = 1,
    Validation = 2,
    Runtime = 3,
}

/// A failed command: exit class and a message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub outcome: Outcome,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { outcome: Outcome::UsageOrIo, message: message.into() }
    }

    pub fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Self::usage(format!("{}: {err}", path.display()))
    }
}

#[derive(Parser)]
#[command(name = "imagelab", version, about = "Block-based image pipeline runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and execute a pipeline on an input image.
    Run {
        #[arg(long)]
        pipeline: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Final image; .png or .ppm.
        #[arg(long)]
        output: PathBuf,
        /// Write stage-NN-<op>.png for every stage into this directory.
        #[arg(long)]
        dump_stages: Option<PathBuf>,
        /// Also write the run report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a pipeline document against the rule engine.
    Validate { pipeline: PathBuf },
    /// Browse the operator catalog.
    Ops {
        #[command(subcommand)]
        command: OpsCommand,
    },
}

#[derive(Subcommand)]
enum OpsCommand {
    /// One operator per line: id and category.
    List,
    /// Parameters, format contract and an example block for one operator.
    Describe { id: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Outcome::UsageOrIo as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run { pipeline, input, output, dump_stages, report } => run::run(&run::RunArgs {
            pipeline,
            input,
            output,
            dump_stages,
            report,
        }),
        Command::Validate { pipeline } => run::validate(&pipeline),
        Command::Ops { command: OpsCommand::List } => {
            print!("{}", describe::list());
            Ok(Outcome::Success)
        }
        Command::Ops { command: OpsCommand::Describe { id } } => describe::describe(&id)
            .map(|text| {
                print!("{text}");
                Outcome::Success
            })
            .ok_or_else(|| Failure::usage(format!("unknown operator \"{id}\""))),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(f) => {
            eprintln!("imagelab: {}", f.message);
            ExitCode::from(f.outcome as u8)
        }
    }
}
