mod config;
mod plot;
mod presets;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, Task};
use tasks::RunError;

const DEFAULT_OUTPUT: &str = "results";

/// Open-system OTOCs, Lyapunov exponents and photon statistics for
/// Dicke-class models.
#[derive(Parser)]
#[command(name = "dicke-chaos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output root; overrides the config's `output` field.
    #[arg(long, global = true, env = "DICKE_CHAOS_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TaskArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    GroundScan(TaskArgs),
    PhaseDiagram(TaskArgs),
    Otoc(TaskArgs),
    OtocSuite(TaskArgs),
    Alpha(TaskArgs),
    SkewRelations(TaskArgs),
    G2(TaskArgs),
    Lyapunov(TaskArgs),
    LongTime(TaskArgs),
    /// Runs the bundled configuration of a figure.
    Reproduce {
        /// Preset id such as `fig5`; see `--list`.
        #[arg(long, required_unless_present = "list")]
        figure: Option<String>,
        /// Lists the presets.
        #[arg(long)]
        list: bool,
        /// Prints the preset configurations instead of running them.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(path: &Path, task: Task) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(RunError::Config)?;
    match cfg.task {
        Some(t) if t != task => {
            return Err(RunError::Config(format!(
                "config names task `{}` but `{}` was requested",
                t.name(),
                task.name()
            )))
        }
        _ => cfg.task = Some(task),
    }
    Ok(cfg)
}

fn output_root(common: &Common, cfg: &RunConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn run_one(cfg: &RunConfig, dir: &Path, jobs: Option<usize>) -> Result<(), RunError> {
    let summary = tasks::run(cfg, dir, jobs)?;
    println!("{}", summary.dir.display());
    for f in &summary.files {
        log::info!("wrote {}", f.display());
    }
    for s in &summary.summaries {
        if !s.is_null() {
            println!("{s}");
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let (task, args) = match cli.command {
        Command::Reproduce {
            figure,
            list,
            print_config,
            common,
        } => {
            if list {
                for (id, about) in presets::PRESETS {
                    println!("{id:<20} {about}");
                }
                return Ok(());
            }
            let id = figure.unwrap_or_default();
            let runs = presets::preset(&id).ok_or_else(|| RunError::Config(format!("unknown figure `{id}`")))?;
            if print_config {
                let text = serde_json::to_string_pretty(&runs).map_err(|e| RunError::Config(e.to_string()))?;
                println!("{text}");
                return Ok(());
            }
            for cfg in &runs {
                cfg.validate().map_err(RunError::Config)?;
            }
            for cfg in &runs {
                let dir = output_root(&common, cfg).join(id.to_ascii_lowercase()).join(cfg.label());
                run_one(cfg, &dir, common.jobs)?;
            }
            return Ok(());
        }
        Command::GroundScan(a) => (Task::GroundScan, a),
        Command::PhaseDiagram(a) => (Task::PhaseDiagram, a),
        Command::Otoc(a) => (Task::Otoc, a),
        Command::OtocSuite(a) => (Task::OtocSuite, a),
        Command::Alpha(a) => (Task::Alpha, a),
        Command::SkewRelations(a) => (Task::SkewRelations, a),
        Command::G2(a) => (Task::G2, a),
        Command::Lyapunov(a) => (Task::Lyapunov, a),
        Command::LongTime(a) => (Task::LongTime, a),
    };
    let cfg = load_config(&args.config, task)?;
    cfg.validate().map_err(RunError::Config)?;
    let dir = output_root(&args.common, &cfg).join(cfg.label());
    run_one(&cfg, &dir, args.common.jobs)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
