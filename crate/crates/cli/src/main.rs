use std::path::PathBuf;
use std::process::ExitCode;

use bmnet_core::engine::Scheme;
use bmnet_cli::commands::{self, FigureOptions, DEFAULT_DTS, DEFAULT_PATHS};
use bmnet_cli::config::{self, ExperimentConfig, DEFAULT_J, DEFAULT_SIGMA2};
use bmnet_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

const DEFAULT_OUT: &str = "bmnet-out";

#[derive(Parser)]
#[command(name = "bmnet", version, about = "Simulate and fit the Bouchaud-Mezard network model of wealth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config, or a manifest.json from an earlier run
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory (default: [output] dir, then ./bmnet-out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Milstein,
    Taylor15,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ensemble and write one CSV per snapshot
    Simulate(Common),
    /// Fit every family at each fit time and write evolution.csv
    Evolve(Common),
    /// Tabulate theta(gamma) with the stationary alpha and beta
    Theta {
        #[command(flatten)]
        common: Common,
        #[arg(long = "j", value_name = "J")]
        j: Option<f64>,
        #[arg(long)]
        sigma2: Option<f64>,
    },
    /// Measure strong convergence orders against the exact J = 0 solution
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        scheme: SchemeArg,
        /// Comma-separated step sizes (default 2^-4 ... 2^-9)
        #[arg(long, value_delimiter = ',')]
        dts: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_PATHS)]
        paths: usize,
        #[arg(long)]
        sigma2: Option<f64>,
    },
    /// Regenerate the data behind one of the published figures
    Reproduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "1-5")]
        figure: u32,
        /// Late snapshot time (figures 1, 2) or evolution horizon (3-5)
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long = "n", value_name = "N")]
        n_agents: Option<usize>,
        #[arg(long, value_name = "B")]
        bootstrap: Option<usize>,
        /// Fit times per evolution run
        #[arg(long)]
        fit_points: Option<usize>,
    },
}

fn load(common: &Common) -> Result<Option<ExperimentConfig>, CliError> {
    let Some(path) = &common.config else {
        return Ok(None);
    };
    let mut cfg = config::load(path)?;
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    Ok(Some(cfg))
}

fn require(common: &Common, command: &str) -> Result<ExperimentConfig, CliError> {
    load(common)?.ok_or_else(|| CliError::Config(format!("{command} needs --config PATH")))
}

fn out_dir(common: &Common, cfg: Option<&ExperimentConfig>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.as_ref()).map(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn model_value(cli: Option<f64>, cfg: Option<&ExperimentConfig>, pick: fn(&ExperimentConfig) -> f64, default: f64) -> f64 {
    cli.or_else(|| cfg.map(pick)).unwrap_or(default)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = require(&common, "simulate")?;
            report(&commands::simulate(&cfg, &out_dir(&common, Some(&cfg)))?);
        }
        Command::Evolve(common) => {
            let cfg = require(&common, "evolve")?;
            let out = out_dir(&common, Some(&cfg));
            let records = commands::evolve(&cfg, &out)?;
            for r in &records {
                match &r.outcome {
                    Ok(g) => println!("t={} {} p={} D={}", r.t, r.family, g.p_value, g.ks_stat),
                    Err(e) => println!("t={} {} failed: {e}", r.t, r.family),
                }
            }
            report(&[out.join("evolution.csv"), out.join(commands::MANIFEST)]);
        }
        Command::Theta { common, j, sigma2 } => {
            let cfg = load(&common)?;
            let j = model_value(j, cfg.as_ref(), |c| c.model.j, DEFAULT_J);
            let sigma2 = model_value(sigma2, cfg.as_ref(), |c| c.model.sigma2, DEFAULT_SIGMA2);
            report(&[commands::theta(j, sigma2, &out_dir(&common, cfg.as_ref()))?]);
        }
        Command::Convergence {
            common,
            scheme,
            dts,
            paths,
            sigma2,
        } => {
            let cfg = load(&common)?;
            let sigma2 = model_value(sigma2, cfg.as_ref(), |c| c.model.sigma2, DEFAULT_SIGMA2);
            let seed = common.seed.or(cfg.as_ref().map(|c| c.run.seed)).unwrap_or(0);
            let dts = dts.unwrap_or_else(|| DEFAULT_DTS.to_vec());
            let schemes: &[Scheme] = match scheme {
                SchemeArg::Milstein => &[Scheme::Milstein],
                SchemeArg::Taylor15 => &[Scheme::Taylor15],
                SchemeArg::Both => &[Scheme::Milstein, Scheme::Taylor15],
            };
            let out = out_dir(&common, cfg.as_ref());
            for &s in schemes {
                let rep = commands::convergence(s, sigma2, &dts, paths, seed)?;
                println!("{} slope {}", rep.scheme, rep.fitted_slope);
                report(&[commands::write_convergence(&rep, &out)?]);
            }
        }
        Command::Reproduce {
            common,
            figure,
            t_end,
            n_agents,
            bootstrap,
            fit_points,
        } => {
            if common.config.is_some() {
                return Err(CliError::Config(
                    "reproduce uses the published parameter sets and takes no --config".into(),
                ));
            }
            let defaults = FigureOptions::default();
            let opts = FigureOptions {
                seed: common.seed.unwrap_or(defaults.seed),
                n_agents: n_agents.unwrap_or(defaults.n_agents),
                t_end,
                bootstrap_b: bootstrap.unwrap_or(defaults.bootstrap_b),
                fit_points: fit_points.unwrap_or(defaults.fit_points),
                ..defaults
            };
            let out = out_dir(&common, None);
            let dirs = commands::reproduce(figure, &opts, &out)?;
            report(&dirs);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bmnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
