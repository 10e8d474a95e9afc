use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pml_core::objective::ScanAxis;
use pml_core::Sampling;

use crate::commands::{self, ScanRequest, SweepRange, Table};
use crate::config::{ConfigOverrides, RunConfig};
use crate::error::CliError;
use crate::output;

#[derive(Debug, Parser)]
#[command(name = "pmlopt", version, about = "Discrete PML reflectivity and profile optimization")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    MidpointValue,
    CellAverage2pt,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::MidpointValue => Sampling::MidpointValue,
            SamplingArg::CellAverage2pt => Sampling::CellAverage2pt,
        }
    }
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Free-space wavelength in µm
    #[arg(long, global = true)]
    lambda0: Option<f64>,
    /// Refractive index of the homogeneous medium
    #[arg(long, global = true)]
    n0: Option<f64>,
    /// Grid size in µm
    #[arg(long = "h", global = true)]
    h: Option<f64>,
    /// PML thickness in grid cells
    #[arg(long, global = true)]
    m: Option<usize>,
    /// How σ is sampled between grid nodes
    #[arg(long, global = true, value_enum)]
    sampling: Option<SamplingArg>,
    /// Angular quadrature nodes
    #[arg(long, global = true)]
    quad_nodes: Option<usize>,
    /// Nelder-Mead evaluation cap
    #[arg(long, global = true)]
    max_evals: Option<usize>,
    /// JSON file with any of the above fields; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.apply(&ConfigOverrides {
            lambda0: self.lambda0,
            n0: self.n0,
            h: self.h,
            m: self.m,
            sampling: self.sampling.map(Into::into),
            quad_nodes: self.quad_nodes,
            max_evals: self.max_evals,
        }))
    }
}

#[derive(Debug, Args)]
struct RangeArgs {
    /// Smallest angle, as a fraction of π/2
    #[arg(long, default_value_t = SweepRange::default().min_frac)]
    theta_min: f64,
    /// Largest angle, as a fraction of π/2
    #[arg(long, default_value_t = SweepRange::default().max_frac)]
    theta_max: f64,
    /// Number of angles, endpoints included
    #[arg(long, default_value_t = SweepRange::default().points)]
    points: usize,
}

impl RangeArgs {
    fn range(&self) -> SweepRange {
        SweepRange {
            min_frac: self.theta_min,
            max_frac: self.theta_max,
            points: self.points,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average reflectivity of one profile, optionally with a θ-sweep CSV
    Evaluate {
        profile: String,
        #[command(flatten)]
        range: RangeArgs,
        /// Write the θ-sweep CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize average reflectivity over one profile family
    Optimize {
        /// power, rplus or rminus
        family: String,
        #[arg(long)]
        p: u32,
        /// Also write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// |R| against θ for several profiles
    Sweep {
        #[arg(required = true)]
        profiles: Vec<String>,
        #[command(flatten)]
        range: RangeArgs,
        /// CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average reflectivity over an (a2, ap) grid of the two-term family
    Scan2d {
        #[arg(long, default_value_t = 8)]
        p: u32,
        /// lo,hi,steps
        #[arg(long, default_value = "0,50,101")]
        a2: String,
        /// lo,hi,steps
        #[arg(long, default_value = "0,300,101")]
        ap: String,
        /// Extra a2,ap point merged into the axes, or "none"
        #[arg(long, default_value = "23.3,121.3")]
        include: String,
        /// CSV path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the optimizations for both rational families, p = 2..12
    ReproduceTables {
        #[arg(long, value_enum, default_value = "both")]
        which: WhichTables,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WhichTables {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

fn parse_axis(text: &str) -> Result<ScanAxis, CliError> {
    let bad = || CliError::Usage(format!("axis {text:?} must be lo,hi,steps"));
    let parts: Vec<&str> = text.split(',').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    ScanAxis::new(lo, hi, steps).map_err(CliError::usage)
}

fn parse_point(text: &str) -> Result<Option<(f64, f64)>, CliError> {
    if text == "none" {
        return Ok(None);
    }
    let bad = || CliError::Usage(format!("point {text:?} must be a2,ap or none"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok(Some((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    )))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn create(path: &PathBuf) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = cli.config.resolve()?;
    let print = |stdout: &mut dyn Write, text: &str| match writeln!(stdout, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    };
    match cli.command {
        Command::Evaluate { profile, range, out } => {
            let profile = commands::parse_profile(&profile)?;
            let report = commands::evaluate(&profile, &config)?;
            if let Some(path) = out {
                let cols = commands::sweep(std::slice::from_ref(&profile), &range.range(), &config)?;
                output::write_sweep(create(&path)?, &[profile.to_string()], &cols)?;
            }
            print(stdout, &json(&report))
        }
        Command::Optimize { family, p, out } => {
            let family = commands::parse_family(&family)?;
            let report = commands::optimize(family, p, &config)?;
            let text = json(&report);
            if let Some(path) = out {
                write_text(&path, &format!("{text}\n"))?;
            }
            print(stdout, &text)
        }
        Command::Sweep { profiles, range, out } => {
            let parsed = profiles
                .iter()
                .map(|p| commands::parse_profile(p))
                .collect::<Result<Vec<_>, _>>()?;
            let cols = commands::sweep(&parsed, &range.range(), &config)?;
            match out {
                Some(path) => output::write_sweep(create(&path)?, &profiles, &cols),
                None => output::write_sweep(stdout, &profiles, &cols),
            }
        }
        Command::Scan2d { p, a2, ap, include, out } => {
            let req = ScanRequest {
                p,
                a2: parse_axis(&a2)?,
                ap: parse_axis(&ap)?,
                include: parse_point(&include)?,
            };
            let grid = commands::scan(&req, &config)?;
            match out {
                Some(path) => output::write_scan(create(&path)?, &grid),
                None => output::write_scan(stdout, &grid),
            }
        }
        Command::ReproduceTables { which, out } => {
            let tables: &[Table] = match which {
                WhichTables::One => &[Table::RationalPlus],
                WhichTables::Two => &[Table::RationalMinus],
                WhichTables::Both => &[Table::RationalPlus, Table::RationalMinus],
            };
            for &table in tables {
                let rows = commands::reproduce_table(table, &config);
                let path = commands::write_table(&out, table, &rows)?;
                print(stdout, &path.display().to_string())?;
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 2 usage or parse error, 3 numeric failure,
/// 1 I/O failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
