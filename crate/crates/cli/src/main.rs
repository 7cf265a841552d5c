use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nie_lab::{
    cmd_dataset, cmd_genbound, cmd_scan, cmd_toy, cmd_train, CommandOutcome, DatasetSpec, GridSpec,
    RunConfig,
};
use nie_lab_core::circuits::CircuitKind;
use nie_lab_core::genbound::DeterminantPolicy;
use nie_lab_core::noise::ChannelKind;

#[derive(Parser)]
#[command(name = "nie-lab", version, about = "Noise-induced equalization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and write a dataset.
    Dataset {
        #[arg(long, value_enum, default_value = "sinusoidal")]
        kind: DatasetKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// QFIM spectra over a noise grid and the equalization report.
    Scan(Common),
    /// Train over a noise grid and locate the test-error optimum.
    Train(Common),
    /// Generalization bound over a noise grid.
    Genbound(Common),
    /// Closed-form dephasing toy models.
    Toy(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Sinusoidal,
    Sinusoidal2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Determinant {
    Effective,
    Full,
}

#[derive(Args)]
struct Common {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<usize>,
    /// sin, diab or custom:p1,p2,...
    #[arg(long)]
    grid: Option<GridSpec>,
    #[arg(long)]
    noise: Option<ChannelKind>,
    #[arg(long)]
    circuit: Option<CircuitKind>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Training inputs used for spectra and bounds.
    #[arg(long)]
    inputs: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    determinant: Option<Determinant>,
    /// Skip gnuplot scripts.
    #[arg(long)]
    no_plots: bool,
    #[arg(long, env = "NIE_LAB_WORKERS")]
    workers: Option<usize>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone().into();
                }
            )*};
        }
        over!(out, grid, noise, circuit, layers, epochs, delta, workers);
        if let Some(s) = self.seeds {
            cfg.seeds = Some(s);
        }
        if let Some(i) = self.inputs {
            cfg.inputs = Some(i);
        }
        if let Some(d) = self.determinant {
            cfg.determinant = match d {
                Determinant::Effective => DeterminantPolicy::Effective,
                Determinant::Full => DeterminantPolicy::Full,
            };
        }
        if self.no_plots {
            cfg.plots = false;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<CommandOutcome> {
    let (cfg, command) = match &cli.command {
        Command::Dataset { kind, seed, common } => {
            let mut cfg = common.resolve()?;
            cfg.dataset = match kind {
                DatasetKind::Sinusoidal => DatasetSpec::Sinusoidal { seed: *seed },
                DatasetKind::Sinusoidal2 => DatasetSpec::Sinusoidal2 { seed: *seed },
            };
            (cfg, &cli.command)
        }
        Command::Scan(c) | Command::Train(c) | Command::Genbound(c) | Command::Toy(c) => {
            (c.resolve()?, &cli.command)
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().context("building worker pool")?;
    let outcome = pool.install(|| -> Result<CommandOutcome, nie_lab::CliError> {
        Ok(match command {
            Command::Dataset { .. } => cmd_dataset(&cfg)?,
            Command::Scan(_) => cmd_scan(&cfg)?.outcome,
            Command::Train(_) => cmd_train(&cfg)?.outcome,
            Command::Genbound(_) => cmd_genbound(&cfg)?.outcome,
            Command::Toy(_) => cmd_toy(&cfg)?,
        })
    })?;
    Ok(outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(outcome) => {
            for p in &outcome.outputs {
                println!("{}", p.display());
            }
            if outcome.failures > 0 {
                eprintln!("{} cells failed", outcome.failures);
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
