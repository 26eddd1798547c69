use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hs2_core::bounds::BoundInputs;
use hs2_core::datagen::{self, HsbmParams};
use hs2_core::harness::{
    self, Algorithm, BoundMode, BudgetSpec, ExperimentConfig, GenerateSpec, InstanceSource, SampleSpec, Summary,
};
use hs2_core::oracle::NoiseMode;

#[derive(Parser)]
#[command(name = "hs2", version, about = "Hypergraph active learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated hypergraph (and labels for HSBM) to a directory.
    Generate(GenerateArgs),
    /// Print structural parameters of an instance and its clique expansion.
    Analyze(InstanceFiles),
    /// Print query budgets for an instance or for explicit parameters.
    Bound(BoundArgs),
    /// Run seeded trials and write the results table.
    Run(RunArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// hsbm or knn
    #[arg(long, default_value = "hsbm")]
    generator: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.8)]
    q_in: f64,
    #[arg(long, default_value_t = 0.2)]
    q_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature CSV for knn.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InstanceFiles {
    #[arg(long)]
    hypergraph: PathBuf,
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    hypergraph: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    c_min: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// point, pair or noisy
    #[arg(long, default_value = "point")]
    mode: String,
    /// Sample size used for the noisy budget instead of the solved minimum.
    #[arg(long)]
    sample_size: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algorithm: String,
    #[arg(long)]
    hypergraph: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Generate HSBM instances with this many nodes.
    #[arg(long)]
    hsbm_n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    hsbm_k: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.8)]
    q_in: f64,
    #[arg(long, default_value_t = 0.2)]
    q_out: f64,
    /// A count, auto:q_star, auto:q_star_pair or auto:noisy.
    #[arg(long, default_value = "auto:q_star")]
    budget: String,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    p: Option<f64>,
    /// persistent or fresh
    #[arg(long, default_value = "persistent")]
    noise_mode: String,
    /// A count or auto.
    #[arg(long, default_value = "auto")]
    sample_size: String,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Reuse one instance for all trials (default: true for files, false for HSBM).
    #[arg(long)]
    fix_instance: Option<bool>,
    #[arg(long)]
    skip_random_sampling: bool,
    /// Fill the runtime_ms column.
    #[arg(long)]
    timing: bool,
    /// Directory for per-trial oracle traces.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Results table path.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

fn generate(a: GenerateArgs) -> Result<()> {
    let spec = match a.generator.as_str() {
        "hsbm" => {
            let n = a.n.context("--n is required for hsbm")?;
            GenerateSpec::Hsbm(HsbmParams { n, k: a.k, d: a.d, q_in: a.q_in, q_out: a.q_out, seed: a.seed })
        }
        "knn" => GenerateSpec::Knn { features: a.features.context("--features is required for knn")?, r: a.r },
        other => bail!("unknown generator '{other}'"),
    };
    let (written, manifest) = harness::generate(&spec, &a.out)?;
    println!("{manifest}");
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn analyze(a: InstanceFiles) -> Result<()> {
    let g = datagen::load_hypergraph(&a.hypergraph)?;
    let f = datagen::load_labels(&a.labels)?;
    print!("{}", harness::analyze(&g, &f)?);
    Ok(())
}

fn bound(a: BoundArgs) -> Result<()> {
    let mode: BoundMode = a.mode.parse()?;
    let text = match (&a.hypergraph, &a.labels) {
        (Some(h), Some(l)) => {
            let g = datagen::load_hypergraph(h)?;
            let f = datagen::load_labels(l)?;
            harness::bound(&g, &f, a.delta, a.p, mode, a.sample_size)?
        }
        (None, None) => {
            let need = |name: &str| anyhow::anyhow!("--{name} is required without instance files");
            let inputs = BoundInputs {
                n: a.n.ok_or_else(|| need("n"))?,
                k: a.k.ok_or_else(|| need("k"))?,
                beta: a.beta.ok_or_else(|| need("beta"))?,
                m: a.m.ok_or_else(|| need("m"))?,
                kappa: a.kappa.ok_or_else(|| need("kappa"))?,
                c_min: a.c_min.ok_or_else(|| need("c-min"))?,
                delta: a.delta,
                p: a.p,
            };
            if mode == BoundMode::Noisy && !(a.p > 0.0 && a.p < 0.5) {
                bail!("noisy mode needs p in (0, 1/2), got {}", a.p);
            }
            harness::bound_from_inputs(&inputs, mode, a.sample_size)?
        }
        _ => bail!("--hypergraph and --labels go together"),
    };
    print!("{text}");
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let algorithm: Algorithm = a.algorithm.parse()?;
    let source = match (a.hsbm_n, &a.hypergraph, &a.features, &a.labels) {
        (Some(n), None, None, None) => {
            InstanceSource::Hsbm(HsbmParams { n, k: a.hsbm_k, d: a.d, q_in: a.q_in, q_out: a.q_out, seed: a.seed })
        }
        (None, Some(h), None, Some(l)) => InstanceSource::File { hypergraph: h.clone(), labels: l.clone() },
        (None, None, Some(x), Some(l)) => InstanceSource::Knn { features: x.clone(), labels: l.clone(), r: a.r },
        _ => bail!("give exactly one instance source: --hsbm-n, --hypergraph with --labels, or --features with --labels"),
    };
    let noise_mode = match a.noise_mode.as_str() {
        "persistent" => NoiseMode::Persistent,
        "fresh" => NoiseMode::Fresh,
        other => bail!("unknown noise mode '{other}'"),
    };
    let budget: BudgetSpec = a.budget.parse()?;
    let sample: SampleSpec = a.sample_size.parse()?;
    let config = ExperimentConfig {
        delta: a.delta,
        p: a.p,
        noise_mode,
        sample,
        trials: a.trials,
        master_seed: a.seed,
        workers: a.workers,
        fix_instance: a.fix_instance,
        skip_random_sampling: a.skip_random_sampling,
        timing: a.timing,
        trace_dir: a.trace,
        ..ExperimentConfig::new(algorithm, source, budget)
    };
    let rows = harness::run(&config)?;
    harness::write_results(&a.out, &rows)?;
    if let Some(s) = Summary::of(&rows) {
        println!("{s}");
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Bound(a) => bound(a),
        Command::Run(a) => run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
