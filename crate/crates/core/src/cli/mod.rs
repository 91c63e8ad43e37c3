//! Command-line front end: one JSON config in, one artifact out.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use config::{Command, Format, RunConfig};

use crate::asymptotics::AsymptoticCache;
use crate::exactsolver::{solve_grid, SolverOptions};
use crate::experiments::{
    convergence_sweep, identity_suite, q1_rate_fit, tracer_velocity, ExperimentError, ExperimentReport, TracerSetup,
};
use crate::field::{field_csv, FieldSample, Method};
use crate::numfmt;
use crate::scattering::{add_tracer, generate, ScatteringData};
use crate::specfun::Side;

/// Environment variable overriding the `workers` key.
pub const WORKERS_ENV: &str = "CONDENSATE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "condensate-lab", version, about = "N-soliton condensate solver and experiment runner")]
pub struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the config's `output` key.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {reason}")]
    Parse { field: String, reason: String },
    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } => 2,
            Self::Validation { .. } => 3,
            Self::Io { .. } => 4,
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), reason: err.to_string() }
    }
}

impl From<ExperimentError> for CliError {
    fn from(err: ExperimentError) -> Self {
        Self::Validation { field: err.field().to_string(), reason: err.to_string() }
    }
}

/// What a run wrote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub report: String,
    pub verdicts_failed: usize,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.verdicts_failed > 0)
    }
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    t: f64,
    #[serde(with = "numfmt::complex_pair")]
    psi: Complex64,
    method: Method,
    cond_estimate: Option<f64>,
}

impl From<&FieldSample> for FieldRow {
    fn from(s: &FieldSample) -> Self {
        Self { x: s.x, t: s.t, psi: s.psi, method: s.method, cond_estimate: s.cond_estimate }
    }
}

fn workers(config: &RunConfig) -> usize {
    let from_env = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&w| w > 0);
    from_env.or(config.workers).unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn field_output(samples: &[FieldSample], format: Format) -> String {
    match format {
        Format::Csv => field_csv(samples),
        Format::Json => {
            let rows: Vec<FieldRow> = samples.iter().map(FieldRow::from).collect();
            numfmt::to_json(&rows).expect("field rows serialize") + "\n"
        }
    }
}

fn report_output(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    }
}

fn scattering_output(data: &ScatteringData, format: Format) -> String {
    match format {
        Format::Json => data.to_json() + "\n",
        Format::Csv => {
            let mut out = String::from("re_lambda,im_lambda,re_c,im_c,kind\n");
            let tracer = data.tracer.map(|t| (t.lambda, t.norming, "tracer"));
            let poles = data.eigenvalues.iter().zip(&data.norming).map(|(&l, &c)| (l, c, "condensate"));
            for (l, c, kind) in poles.chain(tracer) {
                out.push_str(&format!(
                    "{},{},{},{},{kind}\n",
                    numfmt::fmt17(l.re),
                    numfmt::fmt17(l.im),
                    numfmt::fmt17(c.re),
                    numfmt::fmt17(c.im)
                ));
            }
            out
        }
    }
}

fn with_tracer(config: &RunConfig, data: ScatteringData) -> Result<ScatteringData, CliError> {
    let Some(_) = config.lambda_o else { return Ok(data) };
    let spec = config.spec()?;
    let lambda = config.tracer_lambda()?;
    let cache = AsymptoticCache::new(&spec).map_err(ExperimentError::from)?;
    let g = cache.g_function(lambda, Side::Off).map_err(ExperimentError::from)?;
    Ok(add_tracer(&data, lambda, config.amplitude.unwrap_or(1.0), g).map_err(ExperimentError::from)?)
}

/// Run a validated config, writing one artifact into `output_dir`.
pub fn execute(config: &RunConfig, output_dir: &Path) -> Result<Summary, CliError> {
    config.validate()?;
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;
    let spec = config.spec()?;
    let workers = workers(config);
    let default_format = match config.command {
        Command::Exact | Command::Asymptotic => Format::Csv,
        _ => Format::Json,
    };
    let format = config.format.unwrap_or(default_format);
    let extension = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = output_dir.join(format!("{}.{extension}", config.command.as_str()));
    let mut warnings = Vec::new();

    let (contents, failed) = match config.command {
        Command::Generate => {
            let data = with_tracer(config, generate(&spec, config.t).map_err(ExperimentError::from)?)?;
            (scattering_output(&data, format), 0)
        }
        Command::Exact => {
            let data = with_tracer(config, generate(&spec, 0.0).map_err(ExperimentError::from)?)?;
            let samples: Vec<FieldSample> = solve_grid(&data, config.grid()?, &SolverOptions::default(), workers)
                .into_iter()
                .map(|outcome| {
                    outcome.unwrap_or_else(|failed| {
                        warnings.push(failed.to_string());
                        FieldSample {
                            x: failed.x,
                            t: failed.t,
                            psi: Complex64::new(f64::NAN, f64::NAN),
                            method: Method::Exact,
                            cond_estimate: None,
                        }
                    })
                })
                .collect();
            (field_output(&samples, format), 0)
        }
        Command::Asymptotic => {
            let cache = AsymptoticCache::new(&spec).map_err(ExperimentError::from)?;
            let samples = config
                .grid()?
                .points()
                .into_iter()
                .map(|(x, t)| {
                    let psi = cache.psi_leading_order(x, t, spec.n).map_err(ExperimentError::from)?;
                    Ok(FieldSample { x, t, psi, method: Method::Asymptotic, cond_estimate: None })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (field_output(&samples, format), 0)
        }
        Command::Compare => {
            let report = convergence_sweep(&spec, config.ns()?, config.grid()?, workers)?;
            (report_output(&report, format), report.failed())
        }
        Command::Tracer => {
            let setup = TracerSetup {
                lambda: config.tracer_lambda()?,
                amplitude: config.amplitude.unwrap_or(1.0),
                boost: config.boost.unwrap_or(0.0),
            };
            let report = tracer_velocity(&spec, &setup, config.grid()?, workers)?;
            (report_output(&report, format), report.failed())
        }
        Command::Identities => {
            let report = identity_suite(&spec);
            (report_output(&report, format), report.failed())
        }
        Command::Q1rate => {
            let report = q1_rate_fit(&spec, &config.probes()?, config.ns()?, config.x, config.t)?;
            (report_output(&report, format), report.failed())
        }
    };
    write(&path, &contents)?;
    Ok(Summary { report: path.display().to_string(), verdicts_failed: failed, warnings })
}

/// Full CLI entry: read the config, run it, print the summary. Returns the exit code.
pub fn run(args: &Args) -> i32 {
    let outcome = fs::read_to_string(&args.config)
        .map_err(|e| CliError::io(&args.config, e))
        .and_then(|text| RunConfig::parse(&text))
        .and_then(|config| {
            let dir = args
                .output
                .clone()
                .or_else(|| config.output.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            execute(&config, &dir)
        });
    match outcome {
        Ok(summary) => {
            for warning in &summary.warnings {
                eprintln!("warn: {warning}");
            }
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            summary.exit_code()
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
