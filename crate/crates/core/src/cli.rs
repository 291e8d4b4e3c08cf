//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on bad input or flags, 1 on internal
//! failure (including a failed `verify-bound` check).

use std::ffi::OsString;
use std::fs::File;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::averages::{alpha_average, binomial_family_schedule, Series, WeightSchedule};
use crate::comparison::{rho_bound_check, rho_model_bound};
use crate::error::{invalid, Error};
use crate::indicators::{ema_series, CloseSeries, IndicatorConfig, DEFAULT_RHO};
use crate::ingest::{self, Format, Orientation};
use crate::moving::{mea, moving_alpha_average};
use crate::oracles::{decaying_sequence_value, OracleCase, OracleFamily, SequenceKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "trendavg", version, about = "Recursive averages, EMA and MACD signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// α-average of a series (limit, or every δ_n with --all)
    Average {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Print every running average, oldest first
        #[arg(long)]
        all: bool,
    },
    /// N-moving α-average for every full window
    Moving {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Window length N
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// N-day EMA of a close series
    Ema {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
        #[command(flatten)]
        input: InputArgs,
        /// Print the EMA of every day, oldest first
        #[arg(long)]
        all: bool,
    },
    /// MACD report with signal line, day states and buy/sell events
    Macd {
        #[arg(long, default_value_t = 12)]
        n1: usize,
        #[arg(long, default_value_t = 26)]
        n2: usize,
        #[arg(long, default_value_t = 9)]
        n0: usize,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
        #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
        format: FileFormat,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Compare (1 − ρ/(N+1))^N against e^{−ρ}
    VerifyBound {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        n: usize,
    },
    /// Closed-form or brute-force reference value
    Oracle {
        #[arg(long, value_enum)]
        family: OracleFamilyArg,
        #[arg(long)]
        n: usize,
        /// Weight of the exponential family
        #[arg(long)]
        alpha: Option<f64>,
        /// Use x_s = (1/s)(1−β)^s instead of x_s = s
        #[arg(long)]
        beta: Option<f64>,
        /// Print the sequence value x_n instead of the average
        #[arg(long)]
        value: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Arithmetic,
    Weighted,
    Binomial,
    Exponential,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleFamilyArg {
    Arithmetic,
    Weighted,
    Exponential,
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    #[arg(long, value_enum, default_value_t = Family::Arithmetic)]
    pub family: Family,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated α_1, α_2, … for the explicit family
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    OldestFirst,
    YoungestFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// One number per line
    Lines,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file; stdin when omitted or `-`
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OrientationArg::OldestFirst)]
    pub orientation: OrientationArg,
    /// Defaults to `csv` for `macd` and `lines` otherwise
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::OldestFirst => Orientation::OldestFirst,
            OrientationArg::YoungestFirst => Orientation::YoungestFirst,
        }
    }
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Csv => Format::Csv,
            FileFormat::Json => Format::Json,
        }
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Renders a scalar with up to 12 fractional digits and no trailing zeros.
pub fn format_scalar(value: f64) -> String {
    let s = format!("{value:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

impl ScheduleArgs {
    fn schedule(&self) -> crate::Result<WeightSchedule> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| invalid(format!("--{name} is required for the {:?} family", self.family)))
        };
        match self.family {
            Family::Arithmetic => Ok(WeightSchedule::Arithmetic),
            Family::Weighted => Ok(WeightSchedule::WeightedArithmetic),
            Family::Binomial => binomial_family_schedule(need(self.mu, "mu")?, need(self.nu, "nu")?),
            Family::Exponential => WeightSchedule::constant(need(self.alpha, "alpha")?),
            Family::Explicit => WeightSchedule::explicit(self.weights.clone()),
        }
    }
}

fn open_input<'a>(path: &Option<PathBuf>, stdin: &'a mut dyn Read) -> CliResult<Box<dyn Read + 'a>> {
    match path {
        Some(p) if p.as_os_str() != "-" => File::open(p)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| Failure::Input(format!("cannot open {}: {e}", p.display()))),
        _ => Ok(Box::new(stdin)),
    }
}

/// Oldest-first values from any supported input format.
fn read_values(input: &InputArgs, default: InputFormat, stdin: &mut dyn Read) -> CliResult<Vec<f64>> {
    let orientation = input.orientation.into();
    let source = open_input(&input.input, stdin)?;
    Ok(match input.input_format.unwrap_or(default) {
        InputFormat::Lines => ingest::read_plain_values(source, orientation)?,
        InputFormat::Csv => ingest::read_records(source, Format::Csv, orientation)?
            .into_iter()
            .map(|r| r.close)
            .collect(),
        InputFormat::Json => ingest::read_records(source, Format::Json, orientation)?
            .into_iter()
            .map(|r| r.close)
            .collect(),
    })
}

fn print_lines(out: &mut dyn Write, values: &[f64]) -> CliResult<()> {
    for &v in values {
        writeln!(out, "{}", format_scalar(v))?;
    }
    Ok(())
}

fn execute(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> CliResult<u8> {
    match cli.command {
        Command::Average { schedule, input, all } => {
            let schedule = schedule.schedule()?;
            let x = Series::new(read_values(&input, InputFormat::Lines, stdin)?)?;
            let avg = alpha_average(&x, &schedule)?;
            if all {
                print_lines(out, avg.deltas())?;
            } else {
                print_lines(out, &[avg.limit()])?;
            }
        }
        Command::Moving { schedule, window, input } => {
            let schedule = schedule.schedule()?;
            let x = Series::new(read_values(&input, InputFormat::Lines, stdin)?)?;
            let moving = match schedule {
                WeightSchedule::Constant(alpha) => mea(&x, window, alpha)?,
                other => moving_alpha_average(&x, window, &other)?,
            };
            print_lines(out, moving.values())?;
        }
        Command::Ema { n, rho, input, all } => {
            let closes = CloseSeries::from_chronological(read_values(&input, InputFormat::Lines, stdin)?)?;
            let trace = ema_series(&closes, n, rho)?;
            if all {
                print_lines(out, trace.as_chronological())?;
            } else {
                print_lines(out, &[trace.get(0).expect("non-empty")])?;
            }
        }
        Command::Macd { n1, n2, n0, rho, format, input } => {
            let config = IndicatorConfig::new(n1, n2, n0, rho)?;
            let in_format = match input.input_format.unwrap_or(InputFormat::Csv) {
                InputFormat::Csv => Format::Csv,
                InputFormat::Json => Format::Json,
                InputFormat::Lines => {
                    return Err(Failure::Input("macd needs csv or json input with dates".into()))
                }
            };
            let source = open_input(&input.input, stdin)?;
            let records = ingest::read_records(source, in_format, input.orientation.into())?;
            let report = ingest::build_report(&records, &config)?;
            let bytes = ingest::report_to_bytes(&report, format.into())
                .map_err(|e| Failure::Internal(e.to_string()))?;
            out.write_all(&bytes)?;
        }
        Command::VerifyBound { rho, n } => {
            let holds = rho_bound_check(rho, n)?;
            writeln!(out, "{}", ingest::format_fixed(rho_model_bound(rho, n)))?;
            writeln!(out, "{}", ingest::format_fixed((-rho).exp()))?;
            if !holds {
                return Ok(EXIT_INTERNAL);
            }
        }
        Command::Oracle { family, n, alpha, beta, value } => {
            let family = match family {
                OracleFamilyArg::Arithmetic => OracleFamily::Arithmetic,
                OracleFamilyArg::Weighted => OracleFamily::Weighted,
                OracleFamilyArg::Exponential => OracleFamily::Exponential(
                    alpha.ok_or_else(|| Failure::Input("--alpha is required for the exponential family".into()))?,
                ),
            };
            let result = match (beta, value) {
                (Some(beta), true) => decaying_sequence_value(n, beta)?,
                (None, true) => {
                    if n == 0 {
                        return Err(Failure::Input("sequence is indexed from 1".into()));
                    }
                    n as f64
                }
                (beta, false) => {
                    let kind = beta.map_or(SequenceKind::Linear, SequenceKind::Decaying);
                    OracleCase::new(family, kind, n)?.expected()?
                }
            };
            print_lines(out, &[result])?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    match execute(cli, stdin, stdout) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(stderr, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
