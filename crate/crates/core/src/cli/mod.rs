//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data error, 2 I/O or usage error.

mod manifest;
pub mod report;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::model::{
    load_dataset_files, load_salary_weights, open, AssessmentConfig, DatasetPaths, IssueLog,
    Loaded, Severity,
};
use crate::pipeline::analyze;
use crate::stats::PRODUCTIVITY_LABEL;
use crate::synth::{generate, SynthSpec};

pub use manifest::{RunManifest, MANIFEST_FILE};

pub const THREADS_ENV: &str = "FACULTYMETRICS_THREADS";

/// Output file names of `run`, in writing order.
pub const RUN_OUTPUTS: [&str; 6] = [
    "mobility_summary.csv",
    "recruitment.csv",
    "turnover.csv",
    "mobility.csv",
    "correlations.csv",
    "productivity.csv",
];

#[derive(Debug, Parser)]
#[command(
    name = "facultymetrics",
    version,
    about = "Research productivity and faculty mobility indicators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the input files and list every data quality issue.
    Validate(DataArgs),
    /// Compute every report into an output directory.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write per-researcher productivity scores.
    Fss {
        #[command(flatten)]
        data: DataArgs,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset from a JSON spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub roster: PathBuf,
    #[arg(long)]
    pub pubs: PathBuf,
    #[arg(long)]
    pub authors: PathBuf,
    /// Salary weights by rank (rank,weight); overrides the config.
    #[arg(long)]
    pub salaries: Option<PathBuf>,
    /// JSON assessment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Assessment period; overrides the config.
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    pub period: Option<Vec<i32>>,
    /// Give every author 1/n credit regardless of field.
    #[arg(long)]
    pub no_positional_credit: bool,
}

impl DataArgs {
    fn paths(&self) -> DatasetPaths {
        DatasetPaths {
            roster: self.roster.clone(),
            publications: self.pubs.clone(),
            authorships: self.authors.clone(),
        }
    }

    /// The effective config. `require_period` is false for validation, which
    /// can run without knowing the period.
    fn config(&self, require_period: bool) -> Result<AssessmentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                AssessmentConfig::from_json(&text)?
            }
            None => match (&self.period, require_period) {
                (Some(_), _) => AssessmentConfig::new(0, 0),
                (None, true) => {
                    return Err(Error::Config(
                        "an assessment period is required: pass --config or --period".into(),
                    ))
                }
                (None, false) => AssessmentConfig::new(i32::MIN, i32::MAX),
            },
        };
        if let Some(p) = &self.period {
            config.period_start = p[0];
            config.period_end = p[1];
        }
        if let Some(path) = &self.salaries {
            config.salary_weights = load_salary_weights(open(path)?)?;
        }
        if self.no_positional_credit {
            config.force_equal_credit = true;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DataErrors(_) | Error::InvalidInput(_) => 1,
        Error::Csv(c) if !matches!(c.kind(), csv::ErrorKind::Io(_)) => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

pub fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate(data) => cmd_validate(&data),
        Command::Run { data, out } => cmd_run(&data, &out).map(|_| ExitCode::SUCCESS),
        Command::Fss { data, out } => cmd_fss(&data, &out).map(|_| ExitCode::SUCCESS),
        Command::Synth { spec, out } => cmd_synth(&spec, &out).map(|_| ExitCode::SUCCESS),
    }
}

fn print_issues(issues: &IssueLog, limit: Option<usize>) {
    let stderr = io::stderr();
    let mut err = stderr.lock();
    let shown = limit.unwrap_or(usize::MAX);
    for issue in issues.iter().take(shown) {
        let _ = writeln!(err, "{issue}");
    }
    if issues.len() > shown {
        let _ = writeln!(err, "... {} more issue(s)", issues.len() - shown);
    }
}

pub fn cmd_validate(data: &DataArgs) -> Result<ExitCode> {
    let config = data.config(false)?;
    let loaded = load_dataset_files(&data.paths(), &config)?;
    print_issues(&loaded.issues, None);
    println!(
        "{} error(s), {} warning(s)",
        loaded.issues.error_count(),
        loaded.issues.warning_count()
    );
    Ok(if loaded.issues.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

const ISSUE_DISPLAY_LIMIT: usize = 50;

fn load_clean(data: &DataArgs, config: &AssessmentConfig) -> Result<Loaded> {
    let loaded = load_dataset_files(&data.paths(), config)?;
    if loaded.issues.has_errors() {
        let errors: IssueLog = loaded
            .issues
            .iter()
            .filter(|i| i.severity == Severity::Error)
            .cloned()
            .collect::<Vec<_>>()
            .into();
        print_issues(&errors, Some(ISSUE_DISPLAY_LIMIT));
        return Err(Error::DataErrors(errors.len()));
    }
    Ok(loaded)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn cmd_run(data: &DataArgs, out: &Path) -> Result<RunManifest> {
    let config = data.config(true)?;
    let loaded = load_clean(data, &config)?;
    let analysis = analyze(&loaded.dataset, &config)?;
    let mut issues = loaded.issues;
    issues.extend(analysis.issues.clone());
    print_issues(&issues, Some(ISSUE_DISPLAY_LIMIT));

    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let labels: Vec<String> = Indicator::ALL
        .iter()
        .map(|i| i.label().to_string())
        .chain([PRODUCTIVITY_LABEL.to_string()])
        .collect();
    for name in RUN_OUTPUTS {
        let path = out.join(name);
        let mut w = create(&path)?;
        match name {
            "mobility_summary.csv" => report::write_mobility_summary(&mut w, &analysis.mobility)?,
            "recruitment.csv" => {
                report::write_indicator_table(&mut w, &analysis.effectiveness, Indicator::R11)?
            }
            "turnover.csv" => {
                report::write_indicator_table(&mut w, &analysis.effectiveness, Indicator::T11)?
            }
            "mobility.csv" => {
                report::write_indicator_table(&mut w, &analysis.effectiveness, Indicator::M11)?
            }
            "correlations.csv" => {
                report::write_correlations(&mut w, analysis.correlations.as_ref(), &labels)?
            }
            "productivity.csv" => report::write_university_productivity(
                &mut w,
                &analysis.university_productivity,
                &analysis.productivity,
            )?,
            _ => unreachable!("every output has a writer"),
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }

    let manifest =
        RunManifest::build(data, &config, &loaded.dataset, &analysis, out, &RUN_OUTPUTS)?;
    manifest.write(&out.join(MANIFEST_FILE))?;
    Ok(manifest)
}

pub fn cmd_fss(data: &DataArgs, out: &Path) -> Result<()> {
    let config = data.config(true)?;
    let loaded = load_clean(data, &config)?;
    let analysis = analyze(&loaded.dataset, &config)?;
    print_issues(&analysis.issues, Some(ISSUE_DISPLAY_LIMIT));
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = create(out)?;
    report::write_researcher_productivity(&mut w, &analysis.productivity)?;
    w.flush().map_err(|e| Error::io(out, e))
}

pub fn cmd_synth(spec_path: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(spec_path).map_err(|e| Error::io(spec_path, e))?;
    let spec = SynthSpec::from_json(&text)?;
    generate(&spec, out)?;
    Ok(())
}
