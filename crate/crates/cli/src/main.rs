//! `degenerate`: verify solution identities, emit field tables, plan control
//! schedules and sweep the mass ratio from JSON scenario files.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use degenerate_core::catalog::BUILTIN_NAMES;
use degenerate_core::control::{self, export, ExportFormat, PlanError};
use degenerate_core::scenario::{builtin_scenario, builtin_source, run_checks, ScenarioConfig, ScenarioError};
use degenerate_core::verify::{massive_report, SamplingPlan, TOL_PIPELINE};
use degenerate_core::{parse, Expr};

#[derive(Parser)]
#[command(name = "degenerate", version, about = "Degenerate Dirac and Weyl solutions: checks, fields and control plans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ExportFormat::Csv,
            Format::Json => ExportFormat::Json,
        }
    }
}

#[derive(clap::Args)]
struct SamplingArgs {
    /// Number of random sample points (default: the scenario's, else 100)
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed (default: the scenario's)
    #[arg(long)]
    seed: Option<u64>,
}

impl SamplingArgs {
    fn plan(&self, config: &ScenarioConfig) -> SamplingPlan {
        let mut plan = config.sampling_plan();
        if let Some(n) = self.points {
            plan.count = n;
        }
        if let Some(s) = self.seed {
            plan.seed = s;
        }
        plan
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every residual, field and consistency check of a scenario
    Verify {
        /// Scenario JSON file or bundled scenario name
        config: String,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Tolerance for asserted checks
        #[arg(long, default_value_t = TOL_PIPELINE)]
        tol: f64,
    },
    /// Sample the scenario's fields over its grid
    Fields {
        config: String,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Plan and sample the control fields of a trajectory scenario
    Plan {
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also print the plan's verification report
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, default_value_t = TOL_PIPELINE)]
        tol: f64,
    },
    /// Near-degeneracy quantities for a list of mass ratios
    Sweep {
        /// Base scenario (default: massive_sweep)
        config: Option<String>,
        /// Comma-separated mass ratios e = m/E in [0, 1)
        #[arg(long, value_delimiter = ',')]
        e: Option<Vec<f64>>,
        /// Family function s
        #[arg(long)]
        s: Option<String>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// List bundled scenarios, or print one as JSON
    Catalog { name: Option<String> },
}

enum Failure {
    Verification(String),
    Config(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Plan(PlanError::Unsound(msg)) => Failure::Verification(msg),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("I/O error: {e}"))
    }
}

fn load(config: &str) -> Result<ScenarioConfig, Failure> {
    let path = Path::new(config);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{config}: {e}")))?;
        return ScenarioConfig::from_json(&text).map_err(|e| Failure::Config(format!("{config}: {e}")));
    }
    builtin_scenario(config).ok_or_else(|| {
        Failure::Config(format!(
            "{config}: no such file or bundled scenario (bundled: {})",
            BUILTIN_NAMES.join(", ")
        ))
    })
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => Ok(io::stdout().lock().write_all(bytes)?),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Config(e.to_string()))?;
    text.push('\n');
    Ok(io::stdout().lock().write_all(text.as_bytes())?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { config, sampling, tol } => {
            let cfg = load(&config)?;
            let report = run_checks(&cfg, &sampling.plan(&cfg), tol)?;
            print_json(&report)?;
            if !report.passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.passed == Some(false))
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))));
            }
            Ok(())
        }
        Command::Fields { config, out, format } => {
            let cfg = load(&config)?;
            let (fields, params) = cfg.configured_fields()?;
            let grid = cfg.grid_points()?;
            let samples = control::sample_fields(&fields, &params, &grid).map_err(|e| Failure::Config(e.to_string()))?;
            let mut bytes = Vec::new();
            export(&samples, format.into(), &mut bytes)?;
            write_output(&out, &bytes)
        }
        Command::Plan {
            config,
            out,
            format,
            verify,
            sampling,
            tol,
        } => {
            let cfg = load(&config)?;
            let traj = cfg.trajectory()?;
            let plan = sampling.plan(&cfg);
            let built = control::build(&traj, &plan, tol).map_err(ScenarioError::from)?;
            if verify {
                let report = serde_json::to_string_pretty(&built.verification).map_err(|e| Failure::Config(e.to_string()))?;
                if out.is_some() {
                    println!("{report}");
                } else {
                    eprintln!("{report}");
                }
            }
            if !built.verification.sound {
                return Err(Failure::Verification("plan failed its own verification".into()));
            }
            let grid = cfg.grid_points()?;
            let samples = control::sample_fields(&built.total_fields, &traj.params, &grid)
                .map_err(|e| Failure::Config(e.to_string()))?;
            let mut bytes = Vec::new();
            export(&samples, format.into(), &mut bytes)?;
            write_output(&out, &bytes)
        }
        Command::Sweep { config, e, s, sampling } => {
            let cfg = load(config.as_deref().unwrap_or("massive_sweep"))?;
            let es = e
                .or_else(|| cfg.sweep.as_ref().map(|sw| sw.e.clone()))
                .unwrap_or_else(|| vec![cfg.mass_ratio_e]);
            if let Some(bad) = es.iter().find(|v| !(0.0..1.0).contains(*v)) {
                return Err(Failure::Config(format!("mass ratio e = {bad} is outside [0, 1)")));
            }
            let s: Expr = match s {
                Some(text) => parse(&text).map_err(|e| Failure::Config(format!("--s: {e}")))?,
                None => cfg
                    .sweep
                    .as_ref()
                    .and_then(|sw| sw.s.clone())
                    .or_else(|| cfg.s.clone())
                    .unwrap_or_else(Expr::one),
            };
            let spec = cfg.solution_spec().map_err(ScenarioError::from)?;
            let rows = massive_report(&spec, &es, &s, &sampling.plan(&cfg)).map_err(ScenarioError::from)?;
            print_json(&rows)
        }
        Command::Catalog { name: None } => {
            let mut out = String::new();
            for name in BUILTIN_NAMES {
                let cfg = builtin_scenario(name).expect("bundled scenario");
                out.push_str(&format!("{name}\t{}\n", cfg.description));
            }
            Ok(io::stdout().lock().write_all(out.as_bytes())?)
        }
        Command::Catalog { name: Some(name) } => match builtin_source(&name) {
            Some(src) => Ok(io::stdout().lock().write_all(src.as_bytes())?),
            None => Err(Failure::Config(format!("unknown bundled scenario `{name}`"))),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
