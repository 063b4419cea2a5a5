//! Command-line front end: argument parsing, the four `rdc` subcommands and
//! their CSV/JSON outputs.
//!
//! Exit codes: 0 on success, 2 when the mathematics says no (infeasible,
//! degenerate or too large to enumerate), 3 on misuse (bad flags, bad input
//! files, out-of-domain parameters).

mod commands;
pub mod records;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::error::Error;

pub use commands::{
    cmd_bounds, cmd_discrepancy_report, cmd_discrete_region, cmd_gauss_curves, read_points_csv, write_points_csv,
    BoundsArgs, BoundsReport, BoundsSummary, BranchSummary, Cell, CellBranch, DiscrepancyArgs, DiscrepancyReport,
    DiscreteRegionArgs, DiscreteRegionOutput, GaussCurves, GaussCurvesArgs, Outcome, OutcomeFlag, OuterBoundSummary,
    RegionVerdict, SourceArgs, SourceFile,
};
pub use records::{read_curves_csv, write_curves_csv, Branch, CurveRecord, Model, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("i/o: {0}")]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty result: {0}")]
    Empty(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Infeasible(_) | Error::SizeGuard(_) | Error::Degenerate(_)) => 2,
            CliError::Empty(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rdc", version, about = "Rate-distortion-classification curves, regions and bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gaussian tradeoff curves at several rates, plus the single-encoder sweep.
    GaussCurves(GaussCurvesArgs),
    /// Printed versus directly solved D(C, R) over a (C, R) grid.
    DiscrepancyReport(DiscrepancyArgs),
    /// Grid-enumerated region, extreme points and outer-bound check for a discrete source.
    DiscreteRegion(DiscreteRegionArgs),
    /// Distortion gap and ratio bounds on Gaussian instances.
    Bounds(BoundsArgs),
}

/// Runs one parsed command, writing its outputs.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::GaussCurves(args) => {
            let curves = cmd_gauss_curves(&args)?;
            write_curves_csv(output(args.out.as_deref())?, &curves.records)?;
            eprintln!("{} records; maximum rate -0.5 ln(1 - rho^2) = {:.6} nats", curves.records.len(), curves.r_max);
        }
        Command::DiscrepancyReport(args) => {
            let report = cmd_discrepancy_report(&args)?;
            write_json(output(args.out.as_deref())?, &report)?;
            for s in &report.summary {
                eprintln!("{:>10}: {} cells, {} agree, {} disagree", s.branch.as_str(), s.cells, s.agree, s.disagree);
            }
        }
        Command::DiscreteRegion(args) => {
            let out = cmd_discrete_region(&args)?;
            write_points_csv(output(Some(&args.out))?, &out.frontier)?;
            write_json(output(args.verdict.as_deref())?, &out.verdict)?;
        }
        Command::Bounds(args) => {
            let report = cmd_bounds(&args)?;
            write_json(output(args.out.as_deref())?, &report)?;
        }
    }
    Ok(())
}

/// A buffered file, or stdout when no path is given.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(mut out: impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
