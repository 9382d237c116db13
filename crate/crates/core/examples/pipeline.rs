//! Runs the whole experiment (prepare, both trainings, HARQ sweep and the
//! modulation comparison) at a reduced scale into one output directory.
//! The command-line tool drives the same functions at full scale.
//!
//! `cargo run --release --example pipeline -- [out_dir]`

use anyhow::Result;
use semlink::experiment::{cmd_modexp, cmd_prepare, cmd_sweep, cmd_train, ExperimentConfig, TrainTarget};

const CONFIG: &str = r#"{
  "corpus": { "synthetic_lines": 3000, "n_train": 2000, "n_test": 200 },
  "codec": { "training": { "epochs": 3 } },
  "constellation": { "epochs": 1, "eval_size": 64, "codec": { "training": { "epochs": 2 } } },
  "sweep": { "snr_db": [0.0, 4.0, 8.0, 12.0, 16.0], "sentences": 100 },
  "modexp": { "snr_db": [4.0, 15.0], "sentences": 100 }
}"#;

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::from_json(CONFIG)?;
    cfg.out = std::env::args().nth(1).unwrap_or_else(|| "pipeline_out".into()).into();
    let summary = cmd_prepare(&cfg)?;
    println!("{summary:?}");
    cmd_train(&cfg, TrainTarget::Codec)?;
    cmd_train(&cfg, TrainTarget::Constellation)?;
    print!("{}", cmd_sweep(&cfg)?.to_csv());
    for p in cmd_modexp(&cfg)? {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "{} dB: qam16 {:.4}  trained {:.4}",
            p.snr_db,
            mean(&p.qam16),
            mean(&p.trained)
        );
    }
    println!("artifacts in {}", cfg.out.display());
    Ok(())
}
