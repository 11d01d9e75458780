//! Command-line front end: reads JSON descriptors of spaces, splines and
//! surfaces and writes sampled CSV, SVG plots or refined descriptors.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chebspline::{Error, SplitStrategy};

#[derive(Parser, Debug)]
#[command(name = "chebspline", version, about = "Piecewise Chebyshevian B-spline toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Restrict,
    Reparametrize,
}

impl From<Strategy> for SplitStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Restrict => SplitStrategy::Restrict,
            Strategy::Reparametrize => SplitStrategy::Reparametrize,
        }
    }
}

/// Which end of the affected transition functions knot insertion reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Start,
    End,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// Descriptor to read.
    #[arg(long)]
    input: PathBuf,
    /// Where to write; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of uniform samples over the domain (at least 2).
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(2..))]
    samples: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample every B-spline of a space (and optionally its transition functions).
    Basis {
        #[command(flatten)]
        io: Io,
        /// Derivative order to sample.
        #[arg(long, default_value_t = 0)]
        derivative: usize,
        /// Also write the transition functions to this CSV file.
        #[arg(long)]
        transitions: Option<PathBuf>,
    },
    /// Sample a spline curve.
    Eval {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0)]
        derivative: usize,
        /// Draw a curvature comb (SVG output of planar curves).
        #[arg(long)]
        comb: bool,
        /// Comb length relative to the curve's size.
        #[arg(long, default_value_t = 0.15)]
        comb_scale: f64,
    },
    /// Insert knots and write the refined spline descriptor.
    Insert {
        #[command(flatten)]
        io: Io,
        /// Knot to insert; repeat for several.
        #[arg(long = "at", allow_negative_numbers = true)]
        at: Vec<f64>,
        /// Insert the midpoint of every break-point interval of the domain.
        #[arg(long)]
        midpoints: bool,
        #[arg(long, value_enum, default_value_t = Strategy::Restrict)]
        strategy: Strategy,
        #[arg(long, value_enum, default_value_t = Formula::Start)]
        formula: Formula,
    },
    /// Raise the order by 1 or 2 and write the elevated spline descriptor.
    Elevate {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        r: u8,
        /// JSON array of target sections, one per interval.
        #[arg(long)]
        targets: Option<PathBuf>,
    },
    /// Split a spline into Bézier segments, one per break-point interval.
    Bezier {
        #[command(flatten)]
        io: Io,
    },
    /// Convert a spline on a periodic partition to the clamped form.
    Clamp {
        #[command(flatten)]
        io: Io,
    },
    /// Sample a tensor-product surface on a samples × samples grid.
    Surface {
        #[command(flatten)]
        io: Io,
    },
    /// Knot insertion and order elevation in both orders on one element.
    KrefDemo {
        /// Directory receiving one file per panel.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(2..))]
        samples: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Kernel(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Kernel(
                Error::Singular { .. }
                | Error::NotContained { .. }
                | Error::RemovalFailed { .. }
                | Error::DegenerateRow { .. },
            ) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Basis {
            io,
            derivative,
            transitions,
        } => commands::basis(&io, derivative, transitions.as_deref()),
        Command::Eval {
            io,
            derivative,
            comb,
            comb_scale,
        } => commands::eval(&io, derivative, comb.then_some(comb_scale)),
        Command::Insert {
            io,
            at,
            midpoints,
            strategy,
            formula,
        } => commands::insert(&io, &at, midpoints, strategy.into(), formula),
        Command::Elevate { io, r, targets } => commands::elevate(&io, usize::from(r), targets.as_deref()),
        Command::Bezier { io } => commands::bezier(&io),
        Command::Clamp { io } => commands::clamp(&io),
        Command::Surface { io } => commands::surface(&io),
        Command::KrefDemo {
            output,
            samples,
            format,
        } => commands::kref_demo(&output, samples as usize, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chebspline: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
