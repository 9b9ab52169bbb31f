use std::process::ExitCode;

use clap::{Parser, Subcommand};

use npsupport_cli::commands::{
    cmd_build, cmd_check, cmd_gen, cmd_verify, BuildArgs, CheckArgs, GenArgs, VerifyArgs,
};
use npsupport_cli::sweep::{cmd_sweep, SweepArgs};

/// Sparse supports for hypergraphs of non-piercing subgraphs.
#[derive(Parser)]
#[command(name = "npsupport", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a support and write it as JSON.
    Build(BuildArgs),
    /// Generate an instance.
    Gen(GenArgs),
    /// Test a structural property of an instance.
    Check(CheckArgs),
    /// Run the oracle on an instance and a support.
    Verify(VerifyArgs),
    /// Generate, build and verify over a seeded grid; CSV out.
    Sweep(SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code() as u8)
        }
    }
}
