use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lzsm_cli::{exit, parse_config, run, CliError, Command, Format, Manifest, Overrides};

/// Nonlinear nonreciprocal Landau-Zener-Stückelberg-Majorana simulator.
#[derive(Parser)]
#[command(name = "lzsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Adiabatic spectrum versus time.
    Spectrum(Common),
    /// Spectral region map over (c/Δ, γ/Δ).
    Region(Common),
    /// Biorthogonal amplitude trajectory.
    Trajectory(Common),
    /// Bloch-sphere angle trajectory.
    Bloch(Common),
    /// Josephson versus self-trapped classification.
    Trapping(Common),
    /// Weak-coupling comparison and interference verdict.
    Weak(Common),
    /// Two-parameter sweep.
    Sweep(Common),
    /// Reproduce a figure panel from the built-in manifest.
    Figure {
        /// Panel id such as `fig4c`.
        id: Option<String>,
        /// List the available ids.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, env = "LZSM_WORKERS")]
    workers: Option<usize>,
    /// Output formats, comma separated.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[arg(long, allow_negative_numbers = true)]
    delta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    amp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps0: Option<f64>,
    /// Run length.
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Number of stored samples.
    #[arg(long)]
    samples: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta1: self.delta1,
            delta2: self.delta2,
            c: self.c,
            amp: self.amp,
            omega: self.omega,
            eps0: self.eps0,
            t1: self.t1,
            samples: self.samples,
            out: self.out.clone(),
            formats: self.format.clone(),
        }
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let (command, figure, common) = match cli.command {
        Sub::Spectrum(c) => (Command::Spectrum, None, c),
        Sub::Region(c) => (Command::Region, None, c),
        Sub::Trajectory(c) => (Command::Trajectory, None, c),
        Sub::Bloch(c) => (Command::Bloch, None, c),
        Sub::Trapping(c) => (Command::Trapping, None, c),
        Sub::Weak(c) => (Command::Weak, None, c),
        Sub::Sweep(c) => (Command::Sweep, None, c),
        Sub::Figure { list: true, .. } => {
            for id in Manifest::builtin()?.ids() {
                println!("{id}");
            }
            return Ok(exit::OK);
        }
        Sub::Figure { id, common, .. } => (Command::Figure, id, common),
    };
    let cfg = parse_config(command, figure.as_deref(), common.config.as_deref(), &common.overrides())?;
    let workers = common.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    log::info!("running `{}` with {workers} worker(s)", cfg.command.name());
    let report = run(&cfg, workers)?;
    for f in &report.files {
        println!("{}", f.display());
    }
    if report.masked_cells > 0 {
        log::warn!("{} sweep cell(s) masked as singular or failed", report.masked_cells);
        return Ok(exit::MASKED);
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
