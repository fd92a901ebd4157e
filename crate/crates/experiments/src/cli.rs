use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gme_core::{AlgorithmConfig, GmeError};
use thiserror::Error;

use crate::checks::{self, Check};
use crate::output::{write_csv, ConfigEcho, Report};
use crate::runs::{self, FourQubitState, XxMode};
use crate::svg::{self, Curve};
use crate::sweep::{grid, Series, SweepRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] GmeError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Solver(GmeError::InvalidArgument(_)) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gme", version, about = "Upper bounds on the geometric measure of entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random two-qubit states against the concurrence closed form
    #[command(name = "validate-2q")]
    Validate2q {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Isotropic d x d states over a p grid
    #[command(name = "table-iso")]
    TableIso {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dephased four-qubit states over a t grid
    #[command(name = "table-4q")]
    Table4q {
        #[arg(long, value_enum, default_value_t = StateArg::Cl4)]
        state: StateArg,
        #[command(flatten)]
        common: Common,
    },
    /// Three-qubit GHZ-isotropic curve
    #[command(name = "curve-iso3")]
    CurveIso3 {
        #[command(flatten)]
        common: Common,
    },
    /// Thermal XX ring as a function of temperature
    #[command(name = "xx-temp")]
    XxTemp {
        /// Magnetic fields, one curve each
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5])]
        fields: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Thermal XX ring as a function of the magnetic field
    #[command(name = "xx-field")]
    XxField {
        /// Temperatures, one curve each
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.2, 0.5])]
        temperatures: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        b_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Tensor products of random two-qubit pairs
    Additivity {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    Cl4,
    W4,
    D4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub grid_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Record per-point wall time (makes output run-dependent)
    #[arg(long)]
    pub timing: bool,
}

/// Per-command defaults for flags the user did not give.
struct Defaults {
    epsilon: f64,
    restarts: usize,
    ensemble_size: Option<usize>,
}

impl Common {
    fn config(&self, d: Defaults) -> Result<AlgorithmConfig, CliError> {
        let cfg = AlgorithmConfig {
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            restarts: self.restarts.unwrap_or(d.restarts),
            ensemble_size: self.ensemble_size.or(d.ensemble_size),
            max_iterations: self.max_iters.unwrap_or(AlgorithmConfig::default().max_iterations),
            seed: self.seed,
            track_invariants: true,
            ..AlgorithmConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(CliError::Usage(format!("--grid-step must be in (0, 1], got {}", self.grid_step)));
        }
        Ok(cfg)
    }

    fn echo(&self, cfg: &AlgorithmConfig, uses_grid: bool) -> ConfigEcho {
        ConfigEcho {
            epsilon: cfg.epsilon,
            ensemble_size: cfg.ensemble_size,
            restarts: cfg.restarts,
            seed: cfg.seed,
            max_iterations: cfg.max_iterations,
            grid_step: uses_grid.then_some(self.grid_step),
        }
    }
}

/// Runs a parsed command and writes its outputs; returns the report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let (report, common, x_label) = build_report(&cli.command)?;
    emit(&report, common, x_label)?;
    Ok(report)
}

fn build_report(command: &Command) -> Result<(Report, &Common, &'static str), CliError> {
    let single = |records: Vec<SweepRecord>| vec![Series { label: "gme_upper".into(), fixed: None, records }];
    Ok(match command {
        Command::Validate2q { count, common } => {
            let cfg = common.config(Defaults { epsilon: 1e-15, restarts: 5, ensemble_size: None })?;
            let v = runs::run_two_qubit_validation(*count, &cfg, common.timing)?;
            let checks = checks::two_qubit(&v);
            let summary = serde_json::json!({ "count": count, "max_deviation": v.max_deviation, "mean_iterations": v.mean_iterations });
            let report = Report { command: "validate-2q".into(), config: common.echo(&cfg, false), series: single(v.records), checks, summary: Some(summary) };
            (report, common, "index")
        }
        Command::TableIso { dim, common } => {
            let defaults = match dim {
                2 => Defaults { epsilon: 1e-15, restarts: 5, ensemble_size: None },
                3 => Defaults { epsilon: 1e-10, restarts: 3, ensemble_size: None },
                _ => Defaults { epsilon: 1e-10, restarts: 3, ensemble_size: Some(16) },
            };
            let cfg = common.config(defaults)?;
            let records = runs::run_isotropic_table(*dim, &grid(0.0, 1.0, common.grid_step)?, &cfg, common.timing)?;
            let checks = checks::isotropic_table(*dim, &records);
            let summary = serde_json::json!({ "dim": dim });
            let report = Report { command: "table-iso".into(), config: common.echo(&cfg, true), series: single(records), checks, summary: Some(summary) };
            (report, common, "p")
        }
        Command::Table4q { state, common } => {
            let family = match state {
                StateArg::Cl4 => FourQubitState::Cl4,
                StateArg::W4 => FourQubitState::W4,
                StateArg::D4 => FourQubitState::D4,
            };
            let cfg = common.config(Defaults { epsilon: 1e-15, restarts: 5, ensemble_size: Some(16) })?;
            let records = runs::run_four_qubit_table(family, &grid(0.0, 1.0, common.grid_step)?, &cfg, common.timing)?;
            let checks = checks::four_qubit(&records);
            let summary = serde_json::json!({ "state": family });
            let report = Report { command: "table-4q".into(), config: common.echo(&cfg, true), series: single(records), checks, summary: Some(summary) };
            (report, common, "t")
        }
        Command::CurveIso3 { common } => {
            let cfg = common.config(Defaults { epsilon: 1e-7, restarts: 3, ensemble_size: Some(64) })?;
            let records = runs::run_isotropic3_curve(&isotropic3_grid(common.grid_step)?, &cfg, common.timing)?;
            let checks = checks::isotropic3(&records);
            let report = Report { command: "curve-iso3".into(), config: common.echo(&cfg, true), series: single(records), checks, summary: None };
            (report, common, "p")
        }
        Command::XxTemp { fields, t_max, common } => {
            let cfg = common.config(Defaults { epsilon: 1e-7, restarts: 3, ensemble_size: Some(64) })?;
            if !(*t_max >= common.grid_step) {
                return Err(CliError::Usage(format!("--t-max must be >= --grid-step, got {t_max}")));
            }
            let g = grid(common.grid_step, *t_max, common.grid_step)?;
            let series = runs::run_xx_sweeps(XxMode::Temperature, fields, &g, &cfg, common.timing)?;
            let checks = checks::xx(XxMode::Temperature, &series);
            let report = Report { command: "xx-temp".into(), config: common.echo(&cfg, true), series, checks, summary: None };
            (report, common, "T")
        }
        Command::XxField { temperatures, b_max, common } => {
            let cfg = common.config(Defaults { epsilon: 1e-7, restarts: 3, ensemble_size: Some(64) })?;
            let g = grid(0.0, *b_max, common.grid_step)?;
            let series = runs::run_xx_sweeps(XxMode::Field, temperatures, &g, &cfg, common.timing)?;
            let checks = checks::xx(XxMode::Field, &series);
            let report = Report { command: "xx-field".into(), config: common.echo(&cfg, true), series, checks, summary: None };
            (report, common, "B")
        }
        Command::Additivity { count, common } => {
            let cfg = common.config(Defaults { epsilon: 1e-7, restarts: 1, ensemble_size: None })?;
            let records = runs::run_additivity_study(*count, &cfg, common.timing)?;
            let checks = checks::additivity(&records);
            let summary = serde_json::json!({ "count": count });
            let report = Report { command: "additivity".into(), config: common.echo(&cfg, false), series: single(records), checks, summary: Some(summary) };
            (report, common, "pair")
        }
    })
}

/// `[0, 1]` at the given step plus the near-pure point `p = 0.99`.
pub fn isotropic3_grid(step: f64) -> Result<Vec<f64>, CliError> {
    let mut g = grid(0.0, 1.0, step)?;
    if !g.iter().any(|&p| (p - 0.99).abs() < 1e-9) {
        g.push(0.99);
        g.sort_by(f64::total_cmp);
    }
    Ok(g)
}

fn emit(report: &Report, common: &Common, x_label: &str) -> Result<(), CliError> {
    match common.format {
        Format::Json => write_to(common.out.as_deref(), report.to_json()?.as_bytes())?,
        Format::Csv => {
            if report.series.len() == 1 {
                let mut buf = Vec::new();
                write_csv(&mut buf, &report.series[0].records)?;
                write_to(common.out.as_deref(), &buf)?;
            } else if let Some(out) = &common.out {
                for s in &report.series {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &s.records)?;
                    fs::write(series_path(out, &s.label), buf)?;
                }
            } else {
                let mut stdout = io::stdout().lock();
                for s in &report.series {
                    writeln!(stdout, "# {}", s.label)?;
                    write_csv(&mut stdout, &s.records)?;
                }
            }
        }
    }
    if let Some(path) = &common.svg {
        fs::write(path, svg::render(&curves(report), x_label, "GME upper bound"))?;
    }
    Ok(())
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

/// `out.csv` + `B=0.5` -> `out-B0.5.csv`.
pub fn series_path(out: &Path, label: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tag: String = label.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '.' || *c == '-').collect();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{tag}"),
    };
    out.with_file_name(name)
}

fn curves(report: &Report) -> Vec<Curve> {
    let mut out: Vec<Curve> = report
        .series
        .iter()
        .map(|s| Curve { label: s.label.clone(), points: s.records.iter().map(|r| (r.param, r.gme_upper)).collect(), dashed: false })
        .collect();
    for s in &report.series {
        let cmp: Vec<(f64, f64)> = s.records.iter().filter_map(|r| r.comparison.map(|c| (r.param, c))).collect();
        if !cmp.is_empty() {
            out.push(Curve { label: "two-qubit".into(), points: cmp, dashed: true });
        }
    }
    out
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            print_checks(&report.checks);
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
