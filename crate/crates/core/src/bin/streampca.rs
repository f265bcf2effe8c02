use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use streampca::harness::{
    preset, run_compare, run_gen_spiked, run_offline_ev, run_sweep, write_compare_csv,
    write_manifest, write_sweep_csv, ExperimentSpec, PRESET_NAMES,
};
use streampca::{Error, Execution, Result};

#[derive(Parser)]
#[command(
    name = "streampca",
    version,
    about = "Single-pass streaming PCA experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a spiked-covariance dataset to spiked.spca.
    GenSpiked(Common),
    /// Oja step-size grid against AdaOja, written to sweep.csv.
    Sweep(Common),
    /// Explained-variance curves per algorithm, written to compare.csv.
    Compare(Common),
    /// Offline top-k explained variance for k = 1..K, written to offline_ev.csv.
    OfflineEv(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment description in JSON.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment by name.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    b0: Option<f64>,
    /// Run seed; also the data seed for spiked datasets.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_name = "BLOCKS")]
    checkpoint_every: Option<usize>,
    /// Limit on concurrent runs.
    #[arg(long)]
    workers: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match (&self.config, &self.preset) {
            (Some(path), None) => ExperimentSpec::from_file(path)?,
            (None, Some(name)) => preset(name).ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {name:?}; known presets: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?,
            (None, None) => {
                return Err(Error::Config(
                    "pass --config <file> or --preset <name>".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config("--config and --preset are exclusive".into()))
            }
        };
        if let Some(k) = self.k {
            spec.k = k;
        }
        if let Some(b) = self.batch {
            spec.batch = b;
        }
        if let Some(b0) = self.b0 {
            spec.b0 = b0;
        }
        if let Some(seed) = self.seed {
            spec.set_seed(seed);
        }
        if let Some(out) = &self.out {
            spec.out_dir = out.clone();
        }
        if let Some(every) = self.checkpoint_every {
            spec.checkpoint_every = every;
        }
        if self.workers.is_some() {
            spec.workers = self.workers;
        }
        Ok(spec)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn all_failed(runs: &[streampca::harness::RunRecord]) -> Option<Error> {
    if !runs.is_empty() && runs.iter().all(|r| !r.is_ok()) {
        Some(Error::Degenerate(format!(
            "every run failed; first: {}",
            runs[0].status
        )))
    } else {
        None
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenSpiked(c) => {
            let path = run_gen_spiked(&c.spec()?, "gen-spiked")?;
            println!("{}", path.display());
        }
        Command::Sweep(c) => {
            let spec = c.spec()?;
            let result = run_sweep(&spec, c.execution())?;
            let csv = write_sweep_csv(&spec, &result)?;
            write_manifest(&spec, "sweep", result.runs.clone(), &[&csv])?;
            println!("{}", csv.display());
            if let Some(e) = all_failed(&result.runs) {
                return Err(e);
            }
        }
        Command::Compare(c) => {
            let spec = c.spec()?;
            let result = run_compare(&spec, c.execution())?;
            let csv = write_compare_csv(&spec, &result)?;
            write_manifest(&spec, "compare", result.runs.clone(), &[&csv])?;
            for r in result.runs.iter().filter(|r| !r.is_ok()) {
                eprintln!("{}: {}", r.label, r.status);
            }
            println!("{}", csv.display());
            if let Some(e) = all_failed(&result.runs) {
                return Err(e);
            }
        }
        Command::OfflineEv(c) => {
            let spec = c.spec()?;
            for (k, ev) in run_offline_ev(&spec, "offline-ev")? {
                println!("{k},{ev}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("streampca: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
