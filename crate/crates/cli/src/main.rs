//! `toric`: command-line front end for the generalized toric code toolkit.
//!
//! Every subcommand takes `--config FILE` (JSON with `model` and `task`
//! blocks) and flags that override single fields. Outputs land in `--out`
//! together with `manifest.json`; the summary is printed on stdout. Failures
//! print `{"error": {...}}` on stderr and exit 2 (schema), 3 (enumeration
//! budget) or 4 (invariant breach). `TORIC_WORKERS` sets the worker count.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use config::*;
use error::CliError;
use output::{write_artifacts, write_manifest, RunManifest};

#[derive(Parser)]
#[command(
    name = "toric",
    version,
    about = "Generalized toric codes: entropy, thermal enumeration, Monte Carlo, memory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zero-temperature topological entropy by the rank and Betti routes.
    Te0 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<SchemeKindArg>,
    },
    /// Betti numbers of the torus and, optionally, of every partition region.
    Betti {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        partitions: bool,
    },
    /// The signed partition scheme as cell index lists.
    Partitions {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<SchemeKindArg>,
    },
    /// Exact Z, W and Q_top over a β grid.
    ThermalExact {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        #[arg(long)]
        scheme: Option<SchemeKindArg>,
    },
    /// Metropolis sampling of the gauge theory over a βμ grid.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long = "beta-mu", value_delimiter = ',')]
        beta_mu: Option<Vec<f64>>,
        #[arg(long)]
        sweeps: Option<usize>,
        #[arg(long)]
        thermalization: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "wilson-sizes", value_delimiter = ',')]
        wilson_sizes: Option<Vec<usize>>,
        #[arg(long = "fraction-entry")]
        fraction_entry: Option<usize>,
    },
    /// Memory lifetimes per defect sector and the memory label.
    Memory {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sector: Option<SectorArg>,
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long = "temperature-a")]
        temperature_a: Option<f64>,
        #[arg(long = "temperature-b")]
        temperature_b: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "max-sweeps")]
        max_sweeps: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Checks Z^(D,k)(β;λ,μ) = Z^(D,D-k)(β;μ,λ) by enumeration.
    DualityCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SchemeKindArg {
    Nested,
    Relaxed,
    Slabs,
}

#[derive(Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SectorArg {
    A,
    B,
    Both,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "toric-out")]
    out: PathBuf,
    #[arg(long = "D", value_name = "D")]
    dim: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "L", value_name = "L")]
    size: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
}

/// Collects `(block, field, value)` overrides from set flags.
#[derive(Default)]
struct Overrides(Vec<(&'static str, &'static str, Value)>);

impl Overrides {
    fn add<T: Serialize>(&mut self, block: &'static str, field: &'static str, v: &Option<T>) {
        if let Some(v) = v {
            self.0
                .push((block, field, serde_json::to_value(v).expect("flag values serialize")));
        }
    }

    fn model(common: &Common) -> Self {
        let mut o = Overrides::default();
        o.add("model", "D", &common.dim);
        o.add("model", "k", &common.k);
        o.add("model", "L", &common.size);
        o.add("model", "a", &common.a);
        o.add("model", "lambda", &common.lambda);
        o.add("model", "mu", &common.mu);
        o
    }
}

struct Prepared<T> {
    config: Config<T>,
    resolved: Value,
}

fn prepare<T: DeserializeOwned + Serialize + Default>(
    common: &Common,
    overrides: Overrides,
) -> Result<Prepared<T>, CliError> {
    let mut doc = read_document(common.config.as_deref())?;
    for (block, field, value) in overrides.0 {
        set_field(&mut doc, block, field, value);
    }
    let config: Config<T> = parse(doc)?;
    let resolved = serde_json::to_value(&config).expect("config serializes");
    Ok(Prepared { config, resolved })
}

fn workers() -> Result<usize, CliError> {
    match std::env::var("TORIC_WORKERS") {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::schema("env:TORIC_WORKERS", format!("expected a positive integer, got {v:?}"))
            })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(n)
        }
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn execute<T, F>(name: &str, common: &Common, overrides: Overrides, run: F) -> Result<(), CliError>
where
    T: DeserializeOwned + Serialize + Default,
    F: FnOnce(&Config<T>) -> Result<commands::RunOutput, CliError>,
{
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let workers = workers()?;
    let p: Prepared<T> = prepare(common, overrides)?;
    let out = run(&p.config)?;
    let outputs = write_artifacts(&common.out, &out.artifacts)?;
    let manifest = RunManifest {
        tool: "toric".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        config: p.resolved,
        seeds: out.seeds,
        workers,
        started: started.to_rfc3339(),
        finished: chrono::Utc::now().to_rfc3339(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        outputs,
    };
    write_manifest(&common.out, &manifest)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&out.summary).expect("summary serializes")
    );
    match out.verdict {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Te0 { common, scheme } => {
            let mut o = Overrides::model(&common);
            o.add("task", "scheme", &scheme);
            execute("te0", &common, o, commands::te0)
        }
        Command::Betti { common, partitions } => {
            let mut o = Overrides::model(&common);
            o.add("task", "partitions", &partitions.then_some(true));
            execute("betti", &common, o, commands::betti)
        }
        Command::Partitions { common, scheme } => {
            let mut o = Overrides::model(&common);
            o.add("task", "scheme", &scheme);
            execute("partitions", &common, o, commands::partitions)
        }
        Command::ThermalExact { common, beta, scheme } => {
            let mut o = Overrides::model(&common);
            o.add("task", "beta", &beta);
            o.add("task", "scheme", &scheme);
            execute("thermal-exact", &common, o, commands::thermal_exact)
        }
        Command::Mc {
            common,
            beta_mu,
            sweeps,
            thermalization,
            stride,
            chains,
            seed,
            wilson_sizes,
            fraction_entry,
        } => {
            let mut o = Overrides::model(&common);
            o.add("task", "beta_mu", &beta_mu);
            o.add("task", "sweeps", &sweeps);
            o.add("task", "thermalization", &thermalization);
            o.add("task", "stride", &stride);
            o.add("task", "chains", &chains);
            o.add("task", "seed", &seed);
            o.add("task", "wilson_sizes", &wilson_sizes);
            o.add("task", "fraction_entry", &fraction_entry);
            execute("mc", &common, o, commands::mc)
        }
        Command::Memory {
            common,
            sector,
            temperature,
            temperature_a,
            temperature_b,
            sizes,
            trials,
            max_sweeps,
            seed,
        } => {
            let mut o = Overrides::model(&common);
            o.add("task", "sector", &sector);
            o.add("task", "temperature", &temperature);
            o.add("task", "temperature_a", &temperature_a);
            o.add("task", "temperature_b", &temperature_b);
            o.add("task", "sizes", &sizes);
            o.add("task", "trials", &trials);
            o.add("task", "max_sweeps", &max_sweeps);
            o.add("task", "seed", &seed);
            execute("memory", &common, o, commands::memory)
        }
        Command::DualityCheck { common, beta } => {
            let mut o = Overrides::model(&common);
            o.add("task", "beta", &beta);
            execute("duality-check", &common, o, commands::duality)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::schema("argv", e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("{}", json!(e.to_json()));
        std::process::exit(e.exit_code());
    }
}
