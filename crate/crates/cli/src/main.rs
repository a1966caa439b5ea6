use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod job;
mod render;

use oklab::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Classify,
    Decompose,
    Body,
    Invariants,
    Check,
    Sample,
    Render,
}

/// Exact Okounkov bodies and Zariski decompositions.
#[derive(Debug, Parser)]
#[command(name = "oklab", version)]
pub struct Args {
    /// Job file (variety, divisor, flags); instance directory for `check`;
    /// polytope file for `render`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub task: Task,
    /// Body kind (big, val, lim), decomposition kind (sigma, s, good) or a
    /// check name.
    #[arg(long)]
    pub kind: Option<String>,
    /// Flag: an index into the job's flag list, an ordered cone like `0,1`,
    /// or a curve name.
    #[arg(long)]
    pub flag: Option<String>,
    /// `ratio:steps`, e.g. `1/2:40`.
    #[arg(long)]
    pub epsilon_schedule: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Io(_) => 2,
        Error::HypothesisUnmet(_) | Error::NotPseudoEffective => 3,
        Error::Refuted(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match job::run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("oklab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Schema("x".into())), 2);
        assert_eq!(exit_code(&Error::HypothesisUnmet("x".into())), 3);
        assert_eq!(exit_code(&Error::NotPseudoEffective), 3);
        assert_eq!(exit_code(&Error::Refuted("x".into())), 4);
    }
}
