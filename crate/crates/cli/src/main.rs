use std::path::PathBuf;
use std::process::ExitCode;

use bubblemesh::pipeline::config::{Mode, PipelineConfig};
use bubblemesh::pipeline::{report_for_file, run};
use clap::{Args, Parser, Subcommand};

/// Bubble-packing triangle mesh generator for planar domains and parametric
/// surfaces.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mode named in the configuration file.
    Run(Common),
    /// Mesh a rectangular plate with holes.
    Plane(Common),
    /// Mesh a parametric surface through its flattened parameterization.
    Surface(Common),
    /// Re-mesh an existing surface mesh given as `input_mesh`.
    Remesh(Common),
    /// Relax identical initial bubbles under both quantity-control strategies.
    CompareQc(Common),
    /// Print the quality table of an OBJ or OFF mesh.
    Report {
        /// Mesh file; defaults to `input_mesh` of the configuration.
        mesh: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; all keys are optional.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Leave wall-clock times out of traces and summaries.
    #[arg(long)]
    no_time: bool,
}

fn load(path: Option<&PathBuf>) -> bubblemesh::Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn configure(common: &Common, mode: Option<Mode>) -> bubblemesh::Result<PipelineConfig> {
    let mut cfg = load(common.config.as_ref())?;
    if let Some(m) = mode {
        cfg.mode = m;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if common.no_time {
        cfg.record_time = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> bubblemesh::Result<String> {
    let (common, mode) = match &cli.command {
        Command::Run(c) => (c, None),
        Command::Plane(c) => (c, Some(Mode::Plane)),
        Command::Surface(c) => (c, Some(Mode::Surface)),
        Command::Remesh(c) => (c, Some(Mode::Remesh)),
        Command::CompareQc(c) => (c, Some(Mode::CompareQc)),
        Command::Report { mesh, config } => {
            let path = match mesh {
                Some(p) => p.clone(),
                None => load(config.as_ref())?
                    .input_mesh
                    .ok_or_else(|| bubblemesh::Error::Config("no mesh file given".into()))?,
            };
            return report_for_file(path);
        }
    };
    let cfg = configure(common, mode).map_err(|e| bubblemesh::Error::Stage {
        stage: "config",
        source: Box::new(e),
    })?;
    log::info!("mode {:?}, output in {}", cfg.mode, cfg.output_dir.display());
    run(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
