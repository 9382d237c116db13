//! Command-line front end for the experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use semlink::experiment::{
    cmd_gradcheck, cmd_modexp, cmd_prepare, cmd_sweep, cmd_train, ExperimentConfig, TrainTarget, GRADCHECK_TOLERANCE,
};

#[derive(Parser, Debug)]
#[command(
    name = "semlink",
    version,
    about = "Semantic HARQ and learned-constellation link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed (overrides the file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (overrides the file).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load or generate the corpus, split it, build vocabulary and Huffman table.
    Prepare,
    /// Train the HARQ codec or the learned constellation.
    Train {
        #[arg(long, value_enum, default_value = "codec")]
        target: Target,
    },
    /// Run the HARQ success-rate sweep.
    Sweep,
    /// Compare 16-QAM with the learned constellation.
    Modexp,
    /// Check analytic gradients against finite differences.
    Gradcheck,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Codec,
    Constellation,
}

fn config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> anyhow::Result<bool> {
    match cli.command {
        Command::Prepare => {
            let s = cmd_prepare(cfg)?;
            println!(
                "retained {} sentences, dropped {}; train {}, test {}, vocabulary {}",
                s.retained, s.dropped, s.n_train, s.n_test, s.vocab_size
            );
        }
        Command::Train { target } => {
            let t = match target {
                Target::Codec => TrainTarget::Codec,
                Target::Constellation => TrainTarget::Constellation,
            };
            cmd_train(cfg, t)?;
            println!("training finished; artifacts in {}", cfg.out.display());
        }
        Command::Sweep => {
            let table = cmd_sweep(cfg)?;
            print!("{}", table.to_csv());
        }
        Command::Modexp => {
            for p in cmd_modexp(cfg)? {
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
                println!(
                    "snr {:>5} dB  qam16 {:.4}  trained {:.4}",
                    p.snr_db,
                    mean(&p.qam16),
                    mean(&p.trained)
                );
            }
        }
        Command::Gradcheck => {
            let report = cmd_gradcheck(cfg)?;
            for (name, err) in &report.checks {
                println!("{name}: max relative error {err:.3e}");
            }
            return Ok(report.max_error < GRADCHECK_TOLERANCE);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gradient check exceeded {GRADCHECK_TOLERANCE:e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
