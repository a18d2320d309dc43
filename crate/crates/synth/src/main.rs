use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use subjsent_synth::{generate_records, SynthConfig};

/// Writes a synthetic corpus in the Sentiment140 CSV layout.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Number of tweets.
    #[arg(short, long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Share of tweets with no opinion words.
    #[arg(long, default_value_t = SynthConfig::default().objective_fraction)]
    objective_fraction: f64,
    /// Label flip rate of the least subjective tweets.
    #[arg(long, default_value_t = SynthConfig::default().max_noise)]
    max_noise: f64,
    /// Label flip rate of objective tweets.
    #[arg(long, default_value_t = SynthConfig::default().objective_noise)]
    objective_noise: f64,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = SynthConfig {
        n_tweets: args.n,
        seed: args.seed,
        objective_fraction: args.objective_fraction,
        max_noise: args.max_noise,
        objective_noise: args.objective_noise,
        ..SynthConfig::default()
    };
    let records = generate_records(config);
    let result = match &args.out {
        Some(path) => std::fs::File::create(path)
            .map_err(|e| format!("{}: {e}", path.display()))
            .and_then(|f| subjsent::corpus::write_csv(std::io::BufWriter::new(f), &records).map_err(|e| e.to_string())),
        None => {
            let stdout = std::io::stdout().lock();
            subjsent::corpus::write_csv(stdout, &records).map_err(|e| e.to_string())
        }
    };
    match result {
        Ok(()) => {
            let _ = writeln!(std::io::stderr(), "wrote {} tweets", records.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("synth: {e}");
            ExitCode::from(2)
        }
    }
}
