mod config;
mod run;
mod schema;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Task};
use run::Artifacts;

/// Symmetry, detection and Fisher-information scenarios for multimode
/// Hong-Ou-Mandel interference.
#[derive(Debug, Parser)]
#[command(name = "homsym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cyclic-symmetry report of the configured state
    Symmetry(TaskArgs),
    /// Output photon-number statistics behind the interferometer
    Detect(TaskArgs),
    /// Fisher information sweep and quantum Fisher information
    Fisher(TaskArgs),
    /// Run the oracle-equivalence suite
    Verify(VerifyArgs),
    /// Print the scenario file schema
    Schema,
}

#[derive(Debug, Args)]
struct TaskArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    kappa_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    residue: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    cases: Option<usize>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(ConfigError),
    #[error("{0}")]
    Core(homsym_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Core(_) => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn load(path: &Path, task: Task) -> Result<config::ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let cfg = config::parse(&text).map_err(CliError::Config)?;
    if let Some(declared) = cfg.task {
        if declared != task {
            return Err(CliError::Config(ConfigError::new(
                "task",
                format!(
                    "config declares task `{}` but the `{}` subcommand was invoked",
                    declared.name(),
                    task.name()
                ),
            )));
        }
    }
    Ok(cfg)
}

fn write_artifacts(out: &Path, task: Task, artifacts: &Artifacts) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut json = serde_json::to_string_pretty(&artifacts.record).expect("JSON values serialize");
    json.push('\n');
    let files = [
        (format!("{}.json", task.name()), json),
        (format!("{}.txt", task.name()), artifacts.summary.clone()),
    ];
    for (name, contents) in files.iter().chain(artifacts.csv.iter()) {
        let path = out.join(name);
        fs::write(&path, contents).map_err(io_err(&path))?;
    }
    Ok(())
}

fn scenario_task(task: Task, args: TaskArgs) -> Result<Artifacts, CliError> {
    let mut cfg = load(&args.config, task)?;
    let p = &mut cfg.params;
    p.kappa_max = args.kappa_max.or(p.kappa_max);
    p.points = args.points.or(p.points);
    p.residue = args.residue.or(p.residue);
    p.samples = args.samples.or(p.samples);
    p.seed = args.common.seed.or(p.seed);
    let scenario = cfg.build().map_err(CliError::Config)?;
    let artifacts = match task {
        Task::Symmetry => run::symmetry(&scenario),
        Task::Detect => run::detect(&scenario),
        Task::Fisher => run::fisher(&scenario),
        Task::Verify => unreachable!("verify has its own arguments"),
    }?;
    write_artifacts(&args.common.out, task, &artifacts)?;
    Ok(artifacts)
}

fn verify_task(args: VerifyArgs) -> Result<Artifacts, CliError> {
    let (mut seed, mut cases) = (None, None);
    if let Some(path) = &args.config {
        let cfg = load(path, Task::Verify)?;
        seed = cfg.params.seed;
        cases = cfg.params.cases;
    }
    let artifacts = run::verify(args.common.seed.or(seed), args.cases.or(cases));
    write_artifacts(&args.common.out, Task::Verify, &artifacts)?;
    Ok(artifacts)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schema => {
            print!("{}", schema::SCHEMA);
            return ExitCode::SUCCESS;
        }
        Command::Symmetry(a) => scenario_task(Task::Symmetry, a),
        Command::Detect(a) => scenario_task(Task::Detect, a),
        Command::Fisher(a) => scenario_task(Task::Fisher, a),
        Command::Verify(a) => verify_task(a),
    };
    match result {
        Ok(artifacts) => {
            print!("{}", artifacts.summary);
            if artifacts.failed {
                eprintln!("error: verification suite reported failures");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
