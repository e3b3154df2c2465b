//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration and input errors, 3 for numerical failures.

pub mod config;
pub mod converge;
pub mod oracle;
pub mod pipeline;
pub mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::mesh::{generate, io, refine, validate, SurfaceMesh};
use crate::solver::{solve_laplace, BoundaryCondition, SolverOptions};
use config::{parse_config, Config, ConfigError, Pipeline};
use report::emit_report;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECKS_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "endlab", version, about = "Harmonic functions on triangulated surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Report path; defaults to `output.report`, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `kahler.alpha`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Overrides `levels` (or `converge.refinements` for converge).
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MeshRunArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Mesh file replacing the generated scenario mesh.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scenario mesh, optionally refined.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of quadrisection steps.
        #[arg(long, default_value_t = 0)]
        levels: usize,
    },
    /// Solve the Laplace equation on a mesh with boundary data per loop.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `LABEL=VALUE`, repeatable.
        #[arg(long = "dirichlet", value_parser = parse_assignment)]
        dirichlet: Vec<(String, f64)>,
        /// Loop label with zero normal flux, repeatable.
        #[arg(long = "neumann")]
        neumann: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Capacity of a boundary loop across an exhaustion
    Capacity(RunArgs),
    /// Classify an end as parabolic or non-parabolic
    Classify(RunArgs),
    /// Build a harmonic function separating two ends
    Separate(RunArgs),
    /// Periods of the conjugate differential over dual cycles
    Periods(MeshRunArgs),
    /// Lower bound on the first Betti number from harmonic periods
    Betti(MeshRunArgs),
    /// Conformal factor and completeness of the modified metric
    Kahler(RunArgs),
    /// Barrier domination on the glued plane
    Counterexample(RunArgs),
    /// Refinement study against a closed-form value
    Converge(RunArgs),
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (label, value) = s.split_once('=').ok_or("expected LABEL=VALUE")?;
    let v: f64 = value.parse().map_err(|e| format!("{value}: {e}"))?;
    Ok((label.to_string(), v))
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() || matches!(e, Error::Io(_)) {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_config(path: &Path) -> Result<Config, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Result<SurfaceMesh, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(io::from_json(&text)?)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_pipeline(pipeline: Pipeline, args: &RunArgs, mesh: Option<&Path>) -> Result<bool, Failure> {
    let mut cfg = load_config(&args.config)?;
    if let Some(p) = cfg.pipeline {
        if p != pipeline {
            return Err(Failure::Config(format!(
                "configuration is for `{}`, not `{}`",
                p.name(),
                pipeline.name()
            )));
        }
    }
    if let Some(a) = args.alpha {
        cfg.kahler.alpha = a;
    }
    if let Some(l) = args.levels {
        if pipeline == Pipeline::Converge {
            cfg.converge.refinements = l;
        } else {
            cfg.levels = Some(l);
        }
    }
    cfg.check()?;
    let mesh = mesh.map(load_mesh).transpose()?;
    let report = pipeline::run_scenario(&cfg, pipeline, mesh)?;
    match args.out.as_deref().or(cfg.output.report.as_deref()) {
        Some(path) => emit_report(&report, path, cfg.output.table.as_deref())?,
        None => print!("{}", report.to_json()),
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} (value {:e}, reference {:e})", c.name, c.value, c.reference);
    }
    Ok(report.passed)
}

fn generate_mesh(config: &Path, out: &Path, levels: usize) -> Result<bool, Failure> {
    let cfg = load_config(config)?;
    let base = generate(&cfg.scenario)?;
    let mesh = if levels == 0 {
        base
    } else {
        refine(&base, levels)?.meshes.pop().expect("refinement keeps every level")
    };
    let v = validate(&mesh);
    for violation in &v.violations {
        eprintln!("{violation:?}");
    }
    write_or_print(Some(out), &io::to_json(&mesh))?;
    Ok(v.violations.is_empty())
}

fn solve(
    mesh: &Path,
    out: Option<&Path>,
    dirichlet: &[(String, f64)],
    neumann: &[String],
    config: Option<&Path>,
) -> Result<bool, Failure> {
    let opts = match config {
        Some(p) => load_config(p)?.solver.options(),
        None => SolverOptions::default(),
    };
    let mesh = load_mesh(mesh)?;
    let mut bc = BoundaryCondition::new();
    for (label, v) in dirichlet {
        bc = bc.dirichlet(label, *v);
    }
    for label in neumann {
        bc = bc.neumann(label);
    }
    let (f, rep) = solve_laplace(&mesh, &bc, &opts)?;
    let doc = serde_json::json!({
        "values": f,
        "iterations": rep.iterations,
        "residual": rep.residual,
    });
    write_or_print(out, &(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"))?;
    Ok(true)
}

pub fn run(cli: Cli) -> ExitCode {
    let outcome = match &cli.command {
        Command::Gen { config, out, levels } => generate_mesh(config, out, *levels),
        Command::Solve {
            mesh,
            out,
            dirichlet,
            neumann,
            config,
        } => solve(mesh, out.as_deref(), dirichlet, neumann, config.as_deref()),
        Command::Capacity(a) => run_pipeline(Pipeline::Capacity, a, None),
        Command::Classify(a) => run_pipeline(Pipeline::Classify, a, None),
        Command::Separate(a) => run_pipeline(Pipeline::Separate, a, None),
        Command::Periods(a) => run_pipeline(Pipeline::Periods, &a.run, a.mesh.as_deref()),
        Command::Betti(a) => run_pipeline(Pipeline::Betti, &a.run, a.mesh.as_deref()),
        Command::Kahler(a) => run_pipeline(Pipeline::Kahler, a, None),
        Command::Counterexample(a) => run_pipeline(Pipeline::Counterexample, a, None),
        Command::Converge(a) => run_pipeline(Pipeline::Converge, a, None),
    };
    ExitCode::from(match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECKS_FAILED,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            EXIT_NUMERICAL
        }
    })
}
