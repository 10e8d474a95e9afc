//! Subcommand implementations. Each returns its result as data; printing
//! and file placement are left to the caller.

use std::path::Path;

use pml_core::objective::{average_reflectivity, scan2d, theta_sweep, ScanAxis, ScanGrid, SweepRow};
use pml_core::optimizer::{default_start, optimize_profile};
use pml_core::published::{self, RATIONAL_MINUS, RATIONAL_PLUS};
use pml_core::{Family, Profile};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_records};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateReport {
    pub profile: String,
    pub avg_reflectivity: f64,
    pub config: RunConfig,
}

pub fn parse_profile(text: &str) -> Result<Profile, CliError> {
    text.parse().map_err(CliError::usage)
}

pub fn evaluate(profile: &Profile, config: &RunConfig) -> Result<EvaluateReport, CliError> {
    let spec = config.objective()?;
    Ok(EvaluateReport {
        profile: profile.to_string(),
        avg_reflectivity: average_reflectivity(profile, &spec)?,
        config: *config,
    })
}

/// Angular range and resolution of a reflectivity sweep, in units of π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub min_frac: f64,
    pub max_frac: f64,
    pub points: usize,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            min_frac: 0.001,
            max_frac: 1.0,
            points: 500,
        }
    }
}

pub fn sweep(profiles: &[Profile], range: &SweepRange, config: &RunConfig) -> Result<Vec<Vec<SweepRow>>, CliError> {
    let grid = config.grid()?;
    // Range problems are the caller's fault; check them before any numerics.
    pml_core::objective::sweep_fractions(range.points, range.min_frac, range.max_frac).map_err(CliError::usage)?;
    profiles
        .iter()
        .map(|p| theta_sweep(p, &grid, range.points, range.min_frac, range.max_frac).map_err(CliError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub family: String,
    pub p: u32,
    pub profile: String,
    /// Absolute values of the optimized coefficients, lowest order first.
    pub coefficients: Vec<f64>,
    pub avg_reflectivity: f64,
    pub iterations: usize,
    pub evals: usize,
    pub termination: String,
    pub config: RunConfig,
}

pub fn parse_family(text: &str) -> Result<Family, CliError> {
    match text.parse::<Family>() {
        Ok(Family::Legacy) | Err(_) => Err(CliError::Usage(format!(
            "unknown family {text:?} (expected power, rplus or rminus)"
        ))),
        Ok(f) => Ok(f),
    }
}

/// Nelder-Mead from `(0, …, 0, 50)`; the power family optimizes `S` at fixed `p`.
pub fn optimize(family: Family, p: u32, config: &RunConfig) -> Result<OptimizeReport, CliError> {
    if p < 2 {
        return Err(CliError::Usage(format!("p must be at least 2, got {p}")));
    }
    let spec = config.objective()?;
    let simplex = config.simplex();
    simplex.validate(family.dimension(p)).map_err(CliError::usage)?;
    let res = optimize_profile(family, p, &default_start(family, p), &spec, &simplex)?;
    let profile = Profile::from_vector(&res.best_point)?;
    Ok(OptimizeReport {
        family: family.tag().to_string(),
        p,
        profile: profile.to_string(),
        coefficients: res.best_point.values,
        avg_reflectivity: res.best_value,
        iterations: res.iterations,
        evals: res.evals,
        termination: res.termination.tag().to_string(),
        config: *config,
    })
}

/// Re-evaluates a report's coefficients under its own echoed config.
pub fn reevaluate(report: &OptimizeReport) -> Result<f64, CliError> {
    let family = parse_family(&report.family)?;
    let v = pml_core::CoefficientVector::new(family, report.p, report.coefficients.clone()).map_err(CliError::usage)?;
    let profile = Profile::from_vector(&v).map_err(CliError::usage)?;
    Ok(evaluate(&profile, &report.config)?.avg_reflectivity)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRequest {
    pub p: u32,
    pub a2: ScanAxis,
    pub ap: ScanAxis,
    pub include: Option<(f64, f64)>,
}

impl Default for ScanRequest {
    fn default() -> Self {
        Self {
            p: 8,
            a2: ScanAxis {
                lo: 0.0,
                hi: 50.0,
                steps: 101,
            },
            ap: ScanAxis {
                lo: 0.0,
                hi: 300.0,
                steps: 101,
            },
            include: Some((23.3, 121.3)),
        }
    }
}

pub fn scan(req: &ScanRequest, config: &RunConfig) -> Result<ScanGrid, CliError> {
    let spec = config.objective()?;
    if req.p < 3 {
        return Err(CliError::Usage(format!("scan2d needs p >= 3, got {}", req.p)));
    }
    for axis in [&req.a2, &req.ap] {
        ScanAxis::new(axis.lo, axis.hi, axis.steps).map_err(CliError::usage)?;
    }
    Ok(scan2d(req.p, &req.a2, &req.ap, req.include, &spec)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// `(Σ |a_k| τ^k)/(1 + τ)`
    RationalPlus,
    /// `(|a_2| τ² + |a_p| τ^p)/(1 − τ)`
    RationalMinus,
}

impl Table {
    pub fn family(self) -> Family {
        match self {
            Table::RationalPlus => Family::RationalPlus,
            Table::RationalMinus => Family::RationalMinus,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Table::RationalPlus => "table1.csv",
            Table::RationalMinus => "table2.csv",
        }
    }

    fn published_avg(self, p: u32) -> Option<f64> {
        match self {
            Table::RationalPlus => published::rational_plus_row(p).map(|r| r.avg_r),
            Table::RationalMinus => published::rational_minus_row(p).map(|r| r.avg_r),
        }
    }

    fn orders(self) -> Vec<u32> {
        match self {
            Table::RationalPlus => RATIONAL_PLUS.iter().map(|r| r.p).collect(),
            Table::RationalMinus => RATIONAL_MINUS.iter().map(|r| r.p).collect(),
        }
    }

    /// Coefficient column names, widest row last.
    fn coefficient_columns(self) -> Vec<String> {
        match self {
            Table::RationalPlus => (2..=12).map(|k| format!("a{k}")).collect(),
            Table::RationalMinus => vec!["a2".into(), "ap".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub p: u32,
    pub published_avg_r: f64,
    pub outcome: Result<OptimizeReport, String>,
}

impl TableRow {
    pub fn ratio(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.avg_reflectivity / self.published_avg_r)
    }
}

/// Runs every order of one table concurrently; rows come back in `p` order
/// and failed runs are kept as rows with an error message.
pub fn reproduce_table(table: Table, config: &RunConfig) -> Vec<TableRow> {
    table
        .orders()
        .into_par_iter()
        .map(|p| TableRow {
            p,
            published_avg_r: table.published_avg(p).expect("order comes from the published table"),
            outcome: optimize(table.family(), p, config).map_err(|e| e.to_string()),
        })
        .collect()
}

pub fn write_table(dir: &Path, table: Table, rows: &[TableRow]) -> Result<std::path::PathBuf, CliError> {
    let coeff_cols = table.coefficient_columns();
    let mut header = vec!["p".to_string()];
    header.extend(coeff_cols.iter().cloned());
    header.extend(
        ["iterations", "evals", "termination", "avg_R", "paper_avg_R", "ratio", "error"]
            .iter()
            .map(|s| s.to_string()),
    );
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut rec = vec![row.p.to_string()];
            match &row.outcome {
                Ok(r) => {
                    let mut coeffs: Vec<String> = r.coefficients.iter().map(|&c| num(c)).collect();
                    coeffs.resize(coeff_cols.len(), String::new());
                    rec.extend(coeffs);
                    rec.extend([
                        r.iterations.to_string(),
                        r.evals.to_string(),
                        r.termination.clone(),
                        num(r.avg_reflectivity),
                        num(row.published_avg_r),
                        num(r.avg_reflectivity / row.published_avg_r),
                        String::new(),
                    ]);
                }
                Err(e) => {
                    rec.extend(vec![String::new(); coeff_cols.len() + 3]);
                    rec.extend([String::new(), num(row.published_avg_r), String::new(), e.clone()]);
                }
            }
            rec
        })
        .collect();

    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(table.file_name());
    let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_records(std::io::BufWriter::new(file), &header, &records)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_reevaluates_to_same_value() {
        let cfg = RunConfig::default();
        for family in [Family::Power, Family::RationalMinus] {
            let r = optimize(family, 3, &cfg).unwrap();
            let again = reevaluate(&r).unwrap();
            assert!((again - r.avg_reflectivity).abs() <= 1e-12, "{family:?}: {again} vs {}", r.avg_reflectivity);
            assert!(r.evals <= cfg.max_evals + family.dimension(3) + 1);
            assert!(r.coefficients.iter().all(|c| *c >= 0.0));
        }
    }

    #[test]
    fn report_json_round_trip_keeps_bits() {
        let r = optimize(Family::RationalMinus, 4, &RunConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(v["avg_reflectivity"].as_f64().unwrap(), r.avg_reflectivity);
        let coeffs: Vec<f64> = v["coefficients"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
        assert_eq!(coeffs, r.coefficients);
    }

    #[test]
    fn family_parsing() {
        assert_eq!(parse_family("rplus").unwrap(), Family::RationalPlus);
        assert!(matches!(parse_family("legacy"), Err(CliError::Usage(_))));
        assert!(matches!(parse_family("cubic"), Err(CliError::Usage(_))));
        assert!(matches!(optimize(Family::Power, 1, &RunConfig::default()), Err(CliError::Usage(_))));
    }

    #[test]
    fn bad_profile_is_usage_error() {
        assert!(matches!(parse_profile("power:p=3"), Err(CliError::Usage(_))));
        assert!(parse_profile("legacy:S=4").is_ok());
    }

    #[test]
    fn sweep_shape_and_endpoints() {
        let profs = vec![parse_profile("power:p=3,S=100.4").unwrap(), Profile::zero()];
        let range = SweepRange { min_frac: 0.1, max_frac: 1.0, points: 7 };
        let cols = sweep(&profs, &range, &RunConfig::default()).unwrap();
        assert_eq!(cols.len(), 2);
        assert!(cols.iter().all(|c| c.len() == 7));
        assert_eq!(cols[0][0].theta_frac, 0.1);
        assert_eq!(cols[0][6].theta_frac, 1.0);
        assert!(cols[1].iter().all(|r| (r.abs_r - 1.0).abs() < 1e-10));
    }

    #[test]
    fn small_scan_has_lossless_corner() {
        let req = ScanRequest {
            p: 8,
            a2: ScanAxis::new(0.0, 40.0, 3).unwrap(),
            ap: ScanAxis::new(0.0, 200.0, 3).unwrap(),
            include: Some((23.3, 121.3)),
        };
        let g = scan(&req, &RunConfig::default()).unwrap();
        assert_eq!(g.a2.len(), 4);
        assert_eq!(g.ap.len(), 4);
        assert!((g.at(0, 0) - 1.0).abs() < 1e-9);
        assert!(g.find(23.3, 121.3).is_some());
    }

    #[test]
    fn table_file_layout() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            TableRow {
                p: 2,
                published_avg_r: 0.0057,
                outcome: optimize(Family::RationalMinus, 2, &RunConfig::default()).map_err(|e| e.to_string()),
            },
            TableRow { p: 3, published_avg_r: 0.005, outcome: Err("boom".into()) },
        ];
        let path = write_table(dir.path(), Table::RationalMinus, &rows).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,a2,ap,iterations,evals,termination,avg_R,paper_avg_R,ratio,error");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",boom"));
        assert_eq!(lines[1].split(',').count(), 10);
    }
}
