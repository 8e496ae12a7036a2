use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coexist::io::{format_decision, load_config, run_experiment, single_decision, Experiment};
use coexist::Error;

/// Monte Carlo sweeps and single designs for a learning-based cognitive
/// small cell access probability.
#[derive(Debug, Parser)]
#[command(name = "coexist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment sweep and write CSV tables plus plot scripts.
    Run {
        /// ApIpVsD1, ApIpVsBlocks, ApVsTargetSnr, ImperfectGammaT or SingleDecision.
        experiment: String,
        #[command(flatten)]
        common: Common,
        /// Trials per sweep point.
        #[arg(long)]
        trials: Option<usize>,
        /// Small cell distances in km: `a,b,c` or `start:stop:step`.
        #[arg(long)]
        d1: Option<String>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Design one access probability and print it as key/value text.
    Decide {
        #[command(flatten)]
        common: Common,
        /// Small cell distance from the MBS in km.
        #[arg(long)]
        d1: Option<f64>,
        /// Macro user distance from the MBS in km; random drop if omitted.
        #[arg(long)]
        d0: Option<f64>,
    },
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML config file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Noisy,
}

impl Common {
    fn overrides(&self) -> BTreeMap<String, String> {
        let mut o = BTreeMap::new();
        if let Some(out) = &self.out {
            o.insert(
                "output_dir".into(),
                format!("{:?}", out.display().to_string()),
            );
        }
        if let Some(seed) = self.seed {
            o.insert("seed".into(), seed.to_string());
        }
        if let Some(mode) = self.mode {
            let m = match mode {
                Mode::Ideal => "ideal",
                Mode::Noisy => "noisy",
            };
            o.insert("measurement".into(), m.into());
        }
        o
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse(_) => 3,
        Error::Io { .. } => 5,
        _ => 4,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            experiment,
            common,
            trials,
            d1,
            sequential,
        } => {
            let experiment: Experiment = experiment.parse()?;
            let mut overrides = common.overrides();
            overrides.insert("experiment".into(), format!("{:?}", experiment.name()));
            if let Some(t) = trials {
                overrides.insert("trials".into(), t.to_string());
            }
            if let Some(d1) = d1 {
                overrides.insert("d1_grid".into(), d1);
            }
            if sequential {
                overrides.insert("execution".into(), "\"sequential\"".into());
            }
            let (cfg, manifest) = load_config(common.config.as_deref(), &overrides)?;
            for path in run_experiment(&cfg, &manifest)? {
                println!("{}", path.display());
            }
        }
        Command::Decide { common, d1, d0 } => {
            let mut overrides = common.overrides();
            if let Some(d1) = d1 {
                overrides.insert("decide_d1".into(), d1.to_string());
            }
            if let Some(d0) = d0 {
                overrides.insert("decide_d0".into(), d0.to_string());
            }
            let (cfg, manifest) = load_config(common.config.as_deref(), &overrides)?;
            let (d0, decision) = single_decision(&cfg, &manifest)?;
            print!("{}", format_decision(manifest.decide_d1, d0, &decision));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
