use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info, warn};
use singspec::config::{
    Abel, Admissible, Converge, Datum, EngineChoice, Experiment, ExperimentConfig, Geometry, ResolventSpec, Solve1d, Solve2d, Subord,
    Weyl,
};
use singspec::error::{AppError, AppResult};
use singspec::experiments::{self, effective_seed, Context, Severity};
use singspec::output::{write_report, Metadata};
use singspec::potential::PotentialSource;
use singspec::presets;

#[derive(Parser, Debug)]
#[command(name = "singspec", version, about = "Spectra of Schrödinger operators with singular potentials")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bundled config by name; see `singspec presets`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Directory for result files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized estimators; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment given by --config or --preset.
    Run,
    /// Check a config without computing anything.
    Validate,
    /// List bundled presets.
    Presets,
    /// Eigenvalues of a 1D problem.
    Solve1d(Solve1dArgs),
    /// Eigenvalues on a planar mesh.
    Solve2d(Solve2dArgs),
    /// Weyl profile of a free Dirichlet problem.
    Weyl(WeylArgs),
    /// Eigenvalue and resolvent convergence under mollification.
    Converge(ConvergeArgs),
    /// Abel-Lidskii reconstruction in the eigenbasis.
    Abel(AbelArgs),
    /// θ-subordination estimate of a 1D potential.
    Subord(SubordArgs),
    /// Admissibility of a potential.
    Admissible(AdmissibleArgs),
}

#[derive(Args, Debug)]
struct Solve1dArgs {
    /// Potential file.
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, default_value = "dirichlet")]
    bc: String,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EngineArg,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 400)]
    cells: usize,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum EngineArg {
    Auto,
    Shooting,
    Galerkin,
}

#[derive(Args, Debug)]
struct Solve2dArgs {
    /// `rect:Lx,Ly,nx,ny` or `disk:R,level`.
    #[arg(long)]
    domain: String,
    /// Field potential file; free operator when omitted.
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long, default_value = "dirichlet")]
    bc: String,
    #[arg(long, default_value_t = 5)]
    count: usize,
}

#[derive(Args, Debug)]
struct WeylArgs {
    /// Interval `a,b`.
    #[arg(long, conflicts_with = "rect", required_unless_present = "rect")]
    interval: Option<String>,
    /// Rectangle `Lx,Ly`.
    #[arg(long)]
    rect: Option<String>,
    #[arg(long, default_value_t = 400.0)]
    r_max: f64,
    #[arg(long, default_value_t = 800)]
    points: usize,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, default_value = "dirichlet")]
    bc: String,
    #[arg(long, default_value_t = 2)]
    k0: u32,
    #[arg(long, default_value_t = 8)]
    k1: u32,
    /// Zero-based eigenvalue indices, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    indices: Vec<usize>,
    /// Mesh cells for the resolvent gap; skipped when omitted.
    #[arg(long)]
    resolvent_cells: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

#[derive(Args, Debug)]
struct AbelArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, default_value = "dirichlet")]
    bc: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    modes: usize,
    #[arg(long, default_value_t = 400)]
    cells: usize,
    #[arg(long, default_value_t = 1e-2)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,
    #[arg(long, default_value_t = 9)]
    times: usize,
    /// `first-mode` or `bubble`.
    #[arg(long, default_value = "first-mode")]
    datum: String,
}

#[derive(Args, Debug)]
struct SubordArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long)]
    theta: f64,
    /// Sine modes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "400")]
    modes: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Args, Debug)]
struct AdmissibleArgs {
    #[arg(long)]
    potential: PathBuf,
    /// Required for field potentials.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, default_value_t = singspec_core::potentials::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value = "dirichlet")]
    tag: String,
}

fn file(p: &Path) -> PotentialSource {
    PotentialSource::File { path: p.display().to_string() }
}

fn pair(s: &str, what: &str) -> AppResult<[f64; 2]> {
    let bad = || AppError::config(format!("{what}: expected two comma-separated numbers, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

fn adhoc(experiment: Experiment) -> (ExperimentConfig, Option<PathBuf>) {
    (ExperimentConfig { name: None, seed: None, output: None, experiment }, None)
}

/// The config to act on and the directory its relative paths resolve in.
fn resolve(cli: &Cli) -> AppResult<(ExperimentConfig, Option<PathBuf>)> {
    let from_flags = || -> AppResult<(ExperimentConfig, Option<PathBuf>)> {
        match (&cli.config, &cli.preset) {
            (Some(_), Some(_)) => Err(AppError::config("give either --config or --preset, not both")),
            (Some(path), None) => {
                let (cfg, _) = ExperimentConfig::load(path)?;
                Ok((cfg, path.parent().map(Path::to_path_buf)))
            }
            (None, Some(name)) => Ok((presets::preset(name)?, None)),
            (None, None) => Err(AppError::config("this command needs --config or --preset")),
        }
    };
    Ok(match &cli.command {
        Command::Run | Command::Validate | Command::Presets => from_flags()?,
        Command::Solve1d(a) => adhoc(Experiment::Solve1d(Solve1d {
            potential: file(&a.potential),
            bc: a.bc.clone(),
            engine: match a.engine {
                EngineArg::Auto => EngineChoice::Auto,
                EngineArg::Shooting => EngineChoice::Shooting,
                EngineArg::Galerkin => EngineChoice::Galerkin,
            },
            count: a.count,
            cells: a.cells,
            check: None,
        })),
        Command::Solve2d(a) => adhoc(Experiment::Solve2d(Solve2d {
            potential: a.potential.as_deref().map(file),
            domain: a.domain.clone(),
            bc: a.bc.clone(),
            count: a.count,
            check: None,
        })),
        Command::Weyl(a) => {
            let geometry = match (&a.interval, &a.rect) {
                (Some(s), _) => Geometry::Interval(pair(s, "interval")?),
                (None, Some(s)) => Geometry::Rectangle(pair(s, "rect")?),
                (None, None) => return Err(AppError::config("weyl needs --interval or --rect")),
            };
            adhoc(Experiment::Weyl(Weyl { geometry, r_max: a.r_max, points: a.points }))
        }
        Command::Converge(a) => adhoc(Experiment::Converge(Converge {
            potential: file(&a.potential),
            bc: a.bc.clone(),
            k0: a.k0,
            k1: a.k1,
            indices: a.indices.clone(),
            resolvent: a.resolvent_cells.map(|cells| ResolventSpec { cells, rho: a.rho }),
        })),
        Command::Abel(a) => adhoc(Experiment::Abel(Abel {
            potential: file(&a.potential),
            bc: a.bc.clone(),
            alpha: a.alpha,
            modes: a.modes,
            cells: a.cells,
            t_max: a.t_max,
            t_min: a.t_min,
            times: a.times,
            datum: match a.datum.as_str() {
                "first-mode" => Datum::FirstMode,
                "bubble" => Datum::Bubble,
                other => return Err(AppError::config(format!("datum: expected first-mode or bubble, got `{other}`"))),
            },
        })),
        Command::Subord(a) => adhoc(Experiment::Subord(Subord {
            potential: file(&a.potential),
            theta: a.theta,
            modes: a.modes.clone(),
            samples: a.samples,
        })),
        Command::Admissible(a) => adhoc(Experiment::Admissible(Admissible {
            potential: file(&a.potential),
            domain: a.domain.clone(),
            epsilon: a.epsilon,
            tag: a.tag.clone(),
        })),
    })
}

fn execute(cli: &Cli) -> AppResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::config(format!("threads: {e}")))?;
    }
    if let Command::Presets = cli.command {
        for name in presets::names() {
            println!("{name}");
        }
        return Ok(());
    }
    let (cfg, base) = resolve(cli)?;
    let ctx = Context { base, seed: cli.seed };
    let issues = experiments::validate(&cfg, &ctx);
    if let Command::Validate = cli.command {
        for i in &issues {
            println!("{}: {}", if i.severity == Severity::Error { "error" } else { "warning" }, i.message);
        }
        if issues.iter().any(|i| i.severity == Severity::Error) {
            return Err(AppError::config(format!("{} issue(s) found", issues.len())));
        }
        if issues.is_empty() {
            println!("ok");
        }
        return Ok(());
    }
    for i in &issues {
        match i.severity {
            Severity::Error => return Err(AppError::config(i.message.clone())),
            Severity::Warning => warn!("{}", i.message),
        }
    }
    let report = experiments::run(&cfg, &ctx)?;
    let meta = Metadata::new(cfg.experiment.kind(), effective_seed(&cfg, &ctx), &cfg.canonical());
    let dir = cfg.out_dir(cli.out_dir.as_deref());
    for path in write_report(&dir, &cfg.stem(), &meta, &report)? {
        info!("wrote {}", path.display());
        println!("{}", path.display());
    }
    if !report.failures.is_empty() {
        for f in &report.failures {
            error!("{f}");
        }
        return Err(AppError::Numerical(singspec_core::Error::Analysis(report.failures.join("; "))));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SINGSPEC_LOG", "error")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("singspec: {e}");
            e.exit_code()
        }
    }
}
