use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use macrosup::pipeline::{self, Command, Family, InstanceSampling, OutputFormat, RunConfig};
use macrosup::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Grover,
    Dj,
    Bv,
    Simon,
    Glued,
    Scaling,
    Evolve,
    Table1,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Grover => Command::Grover,
            Cmd::Dj => Command::Dj,
            Cmd::Bv => Command::Bv,
            Cmd::Simon => Command::Simon,
            Cmd::Glued => Command::Glued,
            Cmd::Scaling => Command::Scaling,
            Cmd::Evolve => Command::Evolve,
            Cmd::Table1 => Command::Table1,
        }
    }
}

/// Macroscopic-superposition index for adiabatic algorithms.
///
/// Sweep commands (grover, dj, bv, simon, glued) emit one row per
/// (n, instance, s). `scaling` and `evolve` need --family.
#[derive(Debug, Parser)]
#[command(name = "macrosup", version)]
struct Cli {
    command: Cmd,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 21)]
    s_points: usize,
    /// all, auto or random:K
    #[arg(long, default_value = "auto")]
    instances: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Glued-trees end weight, in (0, 1/2)
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially
    #[arg(long)]
    workers: Option<usize>,
    /// Family for scaling and evolve
    #[arg(long)]
    family: Option<String>,
    /// Annealing point for the glued-trees scaling series (default s_c)
    #[arg(long)]
    glued_s: Option<f64>,
    /// Local-adiabatic slack for Grover evolution
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Total time of the linear schedule
    #[arg(long, default_value_t = 20.0)]
    total_time: f64,
    /// Instance label for evolve
    #[arg(long)]
    instance: Option<u64>,
}

fn config(cli: &Cli) -> macrosup::Result<RunConfig> {
    let family = cli.family.as_deref().map(str::parse::<Family>).transpose()?;
    let instances: InstanceSampling = cli.instances.parse()?;
    let format: OutputFormat = cli.format.parse()?;
    if cli.workers == Some(0) {
        return Err(Error::Domain("workers must be at least 1".into()));
    }
    let cfg = RunConfig {
        family,
        n_min: cli.n_min,
        n_max: cli.n_max,
        s_points: cli.s_points,
        instances,
        seed: cli.seed,
        alpha: cli.alpha,
        glued_s: cli.glued_s,
        format,
        workers: cli.workers,
        delta: cli.delta,
        total_time: cli.total_time,
        instance: cli.instance,
        ..RunConfig::new(cli.command.into())
    };
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        Error::Numeric(_) | Error::Capability(_) => 3,
        Error::Io(_) | Error::Json(_) => 4,
    }
}

fn run(cli: &Cli) -> macrosup::Result<()> {
    let cfg = config(cli)?;
    // open the sink first so a bad path fails before any computation
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let artifact = pipeline::run(&cfg)?;
    pipeline::write_artifact(&cfg, &artifact, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("macrosup: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
