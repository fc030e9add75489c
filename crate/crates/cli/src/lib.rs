//! Command-line front end: generate synthetic data, fit and evaluate models,
//! run benchmark sweeps and plot them.

pub mod config;
pub mod plot;
pub mod results;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use mmc_core::bench::{run_sweep, Planted, Regime, TrialSpec, PLANT_STREAM, TRAIN_STREAM};
use mmc_core::datagen::derive_seed;
use mmc_core::family::{fit_model, FitConfig, ModelKind};
use mmc_core::format::{data_digest, format_sequences, read_sequences, ModelFile, Provenance};
use mmc_core::{SequenceModel, DEFAULT_EPSILON};
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTRACTABLE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "mmc", version, about = "Max Markov chain toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Hmc,
    Mmc,
    Causal,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Hmc => Regime::Hmc,
            RegimeArg::Mmc => Regime::Mmc,
            RegimeArg::Causal => Regime::Causal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    MmcExact,
    MmcHill,
    MmcGreedy,
    Fmc,
    Hmc,
    Mtd,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::MmcExact => ModelKind::MmcExact,
            ModelArg::MmcHill => ModelKind::MmcHill,
            ModelArg::MmcGreedy => ModelKind::MmcGreedy,
            ModelArg::Fmc => ModelKind::Fmc,
            ModelArg::Hmc => ModelKind::Hmc,
            ModelArg::Mtd => ModelKind::Mtd,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic sequence file plus a `.gen.json` generator description.
    Generate {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long)]
        states: usize,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        windows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trigger probability for the causal regime.
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        /// Minimum gap between planted MMC row maxima (0 = unconstrained).
        #[arg(long, default_value_t = 0.0)]
        min_gap: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a model to a sequence file and save it.
    Fit {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Additive smoothing for the full high-order chain.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Largest state count the exact fitter accepts.
        #[arg(long)]
        exact_cap: Option<usize>,
        /// Seed recorded in the model's provenance block.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the mean per-window log-likelihood of a saved model on a sequence file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Run a benchmark sweep described by a TOML config and write a results CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Render a results CSV as an SVG with one chart per (regime, axis).
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use mmc_core::Error;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Intractable(_) => EXIT_INTRACTABLE,
                Error::Io(_) | Error::Json(_) | Error::Format(_) => EXIT_IO,
                Error::StateSpaceMismatch { .. } | Error::OrderMismatch { .. } => EXIT_IO,
                Error::StateOutOfRange { .. } => EXIT_IO,
                _ => EXIT_USAGE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
            || cause.downcast_ref::<toml::de::Error>().is_some()
        {
            return EXIT_IO;
        }
    }
    EXIT_USAGE
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate {
            regime,
            states,
            order,
            windows,
            seed,
            beta,
            min_gap,
            out,
        } => generate(regime.into(), states, order, windows, seed, beta, min_gap, &out),
        Command::Fit {
            model,
            order,
            data,
            out,
            alpha,
            max_iters,
            tol,
            exact_cap,
            seed,
        } => {
            let mut config = FitConfig::default();
            if let Some(a) = alpha {
                config.hmc_alpha = a;
            }
            if let Some(n) = max_iters {
                config.mtd_max_iters = n;
            }
            if let Some(t) = tol {
                config.mtd_tol = t;
            }
            if let Some(c) = exact_cap {
                config.exact_state_cap = c;
            }
            fit(model.into(), order, &data, &out, &config, seed)
        }
        Command::Eval {
            model,
            data,
            epsilon,
        } => eval(&model, &data, epsilon),
        Command::Bench { config, out, jobs } => bench(&config, &out, jobs),
        Command::Plot { input, out } => {
            let rows = results::read_rows(&input)?;
            std::fs::write(&out, plot::render(&rows))
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct GeneratorDescription {
    regime: Regime,
    states: usize,
    order: usize,
    windows: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    causal_strength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planted_min_gap: Option<f64>,
    /// Planted MMC model or causal effect map; HMC tables are reproducible from the seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    planted: Option<serde_json::Value>,
}

#[allow(clippy::too_many_arguments)]
fn generate(
    regime: Regime,
    states: usize,
    order: usize,
    windows: usize,
    seed: u64,
    beta: f64,
    min_gap: f64,
    out: &Path,
) -> anyhow::Result<()> {
    let mut spec = TrialSpec::new(regime, states, order, windows.max(1), 1);
    spec.seed = seed;
    spec.causal_strength = beta;
    spec.planted_min_gap = min_gap;
    let planted = Planted::new(&spec)?;
    let data = planted.sample(windows, derive_seed(seed, TRAIN_STREAM));

    let planted_json = match &planted {
        Planted::Mmc(m) => {
            let provenance = Provenance {
                fitter: "planted".into(),
                seed: Some(derive_seed(seed, PLANT_STREAM)),
                data_digest: String::new(),
                train_log_likelihood: None,
            };
            let file = ModelFile::new(&mmc_core::family::FittedModel::Mmc(m.clone()), order, provenance);
            Some(serde_json::to_value(file)?)
        }
        Planted::Causal(map) => Some(serde_json::to_value(map)?),
        Planted::Hmc(_) => None,
    };
    let description = GeneratorDescription {
        regime,
        states,
        order,
        windows,
        seed,
        causal_strength: (regime == Regime::Causal).then_some(beta),
        planted_min_gap: (regime == Regime::Mmc && min_gap > 0.0).then_some(min_gap),
        planted: planted_json,
    };

    let comments = vec![format!(
        "generated regime={regime} states={states} order={order} windows={windows} seed={seed}"
    )];
    std::fs::write(out, format_sequences(&data, &comments))
        .with_context(|| format!("writing {}", out.display()))?;
    let sidecar = sidecar_path(out);
    let mut json = serde_json::to_string_pretty(&description)?;
    json.push('\n');
    std::fs::write(&sidecar, json).with_context(|| format!("writing {}", sidecar.display()))?;
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".gen.json");
    PathBuf::from(name)
}

fn fit(
    kind: ModelKind,
    order: usize,
    data_path: &Path,
    out: &Path,
    config: &FitConfig,
    seed: Option<u64>,
) -> anyhow::Result<()> {
    let data = read_sequences(data_path, order)
        .with_context(|| format!("reading {}", data_path.display()))?;
    let outcome = fit_model(kind, &data, config)?;
    let ll = outcome.train_log_likelihood;
    let provenance = Provenance {
        fitter: kind.to_string(),
        seed,
        data_digest: data_digest(&data),
        train_log_likelihood: ll.is_finite().then_some(ll),
    };
    ModelFile::new(&outcome.model, order, provenance)
        .save(out)
        .with_context(|| format!("writing {}", out.display()))?;
    println!(
        "model={kind} states={} order={order} windows={} train_log_likelihood={ll} elapsed_s={:.6}",
        data.num_states(),
        data.num_windows(),
        outcome.elapsed.as_secs_f64()
    );
    Ok(())
}

fn eval(model_path: &Path, data_path: &Path, epsilon: f64) -> anyhow::Result<()> {
    let file = ModelFile::load(model_path)
        .with_context(|| format!("reading {}", model_path.display()))?;
    let model = file.to_model()?;
    let data = read_sequences(data_path, file.order)
        .with_context(|| format!("reading {}", data_path.display()))?;
    let total = model.log_likelihood(&data, epsilon)?;
    let n = data.num_windows();
    println!(
        "mean_log_likelihood={} log_likelihood={total} windows={n} epsilon={epsilon}",
        total / n as f64
    );
    Ok(())
}

fn bench(config_path: &Path, out: &Path, jobs: Option<usize>) -> anyhow::Result<()> {
    let config = config::BenchConfig::load(config_path)?;
    let values = config.values();
    let sweep = || run_sweep(&config.trial, config.axis, &values, config.repeats);
    let rows = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(sweep)?,
        None => sweep()?,
    };
    for row in &rows {
        for reason in &row.skipped {
            eprintln!(
                "skipped {} at {}={}: {reason}",
                row.model, row.axis, row.axis_value
            );
        }
    }
    results::write_rows(out, &rows)?;
    Ok(())
}
